#include "aclab/stability.hpp"

#include "aclab/error.hpp"
#include "aclab/zeroset.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace aclab {

SpectrumReport linearization_spectrum(const ScalarField2D& u, double eps, const SpectrumOptions& opts) {
    const Grid2D& grid = u.grid();
    if (opts.k < 1) throw InvalidArgument("linearization_spectrum: k must be >= 1");
    if (pde_residual(grid, eps, u).sup_norm > 1e-8)
        throw InvalidArgument("linearization_spectrum: u is not a converged solution");

    const AssembledOperator op = assemble_operator(grid, eps, &u);
    const Eigen::SparseMatrix<double>& K = op.matrix;
    const Eigen::VectorXd& V = op.volume;
    const Eigen::Index n = K.rows();
    const Eigen::Index p = std::min<Eigen::Index>(opts.k + 3, n);
    const Eigen::Index k = std::min<Eigen::Index>(opts.k, n);

    Eigen::SparseMatrix<double> shifted = K;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opts.shift * V[i];
    SymmetricSolver solver;
    solver.compute(shifted);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index c = 0; c < p; ++c)
        for (Eigen::Index i = 0; i < n; ++i) X(i, c) = uni(rng);

    SpectrumReport rep;
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
    Eigen::VectorXd theta;
    for (int it = 1; it <= opts.maxit; ++it) {
        for (Eigen::Index c = 0; c < p; ++c) X.col(c) = solver.solve(V.cwiseProduct(X.col(c)));
        // Rayleigh-Ritz in the V inner product.
        const Eigen::MatrixXd KX = K * X;
        const Eigen::MatrixXd VX = V.asDiagonal() * X;
        Eigen::MatrixXd A = X.transpose() * KX;
        Eigen::MatrixXd B = X.transpose() * VX;
        A = 0.5 * (A + A.transpose()).eval();
        B = 0.5 * (B + B.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(A, B);
        X = X * ritz.eigenvectors();
        theta = ritz.eigenvalues();
        rep.iterations = it;
        const double change = (theta.head(k) - prev).cwiseAbs().maxCoeff();
        prev = theta.head(k);
        if (change <= opts.tol * std::max(1.0, theta.head(k).cwiseAbs().maxCoeff())) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged) throw ConvergenceError("linearization_spectrum: subspace iteration stalled");

    const Eigen::MatrixXd VX = V.asDiagonal() * X;
    const Eigen::MatrixXd gram = X.leftCols(k).transpose() * VX.leftCols(k);
    rep.orthonormality_defect = (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    const ScalarField2D zero(grid, 0.0);
    for (Eigen::Index c = 0; c < k; ++c) {
        rep.eigenvalues.push_back(theta[c]);
        // K x = lambda V x, so V^{-1} K x - lambda x is L x - lambda x.
        const Eigen::VectorXd r = (K * X.col(c)).cwiseQuotient(V) - theta[c] * X.col(c);
        rep.residuals.push_back(std::sqrt(r.cwiseProduct(V).dot(r)));
        rep.eigenfields.push_back(op.prolong(X.col(c), zero));
    }
    return rep;
}

namespace {

// Solution of the problem posed on (1 + lambda) Gamma, started from u with
// the new boundary values.
ScalarField2D shifted_solution(const GeneratingCurve& curve, const ScalarField2D& u, double lambda,
                               const DilationOptions& opts, NewtonReport& report) {
    const Grid2D& grid = u.grid();
    const GeneratingCurve scaled = curve.scaled(1.0 + lambda);
    const TubularMap map(scaled, opts.c_star);
    const TubeCoordinates tube = tube_coordinates(grid, map);
    const ScalarField2D approx =
        build_approx_solution(grid, tube, {opts.eps, opts.delta_star, 1});
    ScalarField2D init = u;
    for (std::size_t j = 0; j < grid.side(); ++j)
        for (std::size_t i = 0; i < grid.side(); ++i)
            if (grid.outer(i, j)) init(i, j) = approx(i, j);
    return newton_solve(grid, opts.eps, init, opts.newton, report);
}

double interior_kernel_residual(const AssembledOperator& J, const ScalarField2D& phi) {
    const ScalarField2D r = J.apply(phi);
    double num = 0.0, den = 0.0;
    for (std::size_t idx : J.node) {
        num = std::max(num, std::abs(r.values()[idx]));
        den = std::max(den, std::abs(phi.values()[idx]));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace

PhiReport phi_from_dilation(const GeneratingCurve& curve, const ScalarField2D& u,
                            const DilationOptions& opts) {
    if (!(opts.lambda_step > 0.0) || opts.lambda_step >= 0.5)
        throw InvalidArgument("phi_from_dilation: lambda_step must lie in (0, 0.5)");
    const Grid2D& grid = u.grid();
    const double eps = opts.eps;
    const HeteroclinicProfile prof(eps);
    const TubularMap map(curve, opts.c_star);
    const TubeCoordinates tube = tube_coordinates(grid, map);
    const CutoffParams cp{eps, opts.delta_star};
    PhiReport rep;

    // Boundary data: d/d(lambda) u1(t_lambda / eps) with d t_lambda / d lambda = -zeta0(foot).
    ScalarField2D data(grid, 0.0);
    for (std::size_t j = 0; j < grid.side(); ++j)
        for (std::size_t i = 0; i < grid.side(); ++i) {
            if (!grid.outer(i, j)) continue;
            const std::size_t k = grid.index(i, j);
            const double chi = cutoff_chi(1, tube.foot[k], tube.t[k], cp);
            data(i, j) = chi * prof.dot(tube.t[k]) / eps * (-curve.zeta0_at(tube.foot[k]));
        }
    const AssembledOperator J = assemble_operator(grid, eps, &u);
    SymmetricSolver solver;
    solver.compute(J.matrix);
    rep.negative_pivots = solver.negative_pivots();
    // K phi_int = V r, where r = J applied to the boundary data alone.
    const Eigen::VectorXd rhs = J.volume.cwiseProduct(J.restrict(J.apply(data)));
    rep.phi = J.prolong(solver.solve(rhs), data);
    rep.kernel_residual = interior_kernel_residual(J, rep.phi);

    rep.min_interior = std::numeric_limits<double>::infinity();
    for (std::size_t idx : J.node) rep.min_interior = std::min(rep.min_interior, rep.phi.values()[idx]);
    rep.positive = rep.min_interior > 0.0;

    const ScalarField2D up = shifted_solution(curve, u, opts.lambda_step, opts, rep.plus);
    const ScalarField2D um = shifted_solution(curve, u, -opts.lambda_step, opts, rep.minus);
    if (zero_set_extract(up).components.size() != zero_set_extract(um).components.size())
        throw InvalidArgument("phi_from_dilation: lambda_step changes the zero-set topology");
    rep.phi_fd = ScalarField2D(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        rep.phi_fd.values()[k] = (up.values()[k] - um.values()[k]) / (2.0 * opts.lambda_step);
    rep.fd_kernel_residual = interior_kernel_residual(J, rep.phi_fd);

    const double sup = rep.phi.sup_norm();
    double diff = 0.0, tube_gap = 0.0, tube_ref = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        diff = std::max(diff, std::abs(rep.phi_fd.values()[k] - rep.phi.values()[k]));
        if (std::abs(tube.t[k]) <= 2.0 * eps && tube.d_gamma[k] <= 10.0) {
            const double pred = prof.dot(tube.t[k]) / eps * (-curve.zeta0_at(tube.foot[k]));
            tube_gap = std::max(tube_gap, std::abs(rep.phi.values()[k] - pred));
            tube_ref = std::max(tube_ref, std::abs(pred));
        }
    }
    rep.fd_agreement = sup > 0.0 ? diff / sup : diff;
    rep.tube_agreement = tube_ref > 0.0 ? tube_gap / tube_ref : tube_gap;
    return rep;
}

std::vector<ScalarField2D> random_test_functions(const GeneratingCurve& curve, const Grid2D& grid,
                                                 double eps, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double R = grid.radius(), h = grid.spacing();
    std::vector<ScalarField2D> out;
    for (int trial = 0; trial < trials; ++trial) {
        ScalarField2D psi(grid, 0.0);
        const int bumps = 1 + static_cast<int>(uni(rng) * 5.0) % 5;
        int placed = 0;
        for (int attempt = 0; placed < bumps && attempt < 1000; ++attempt) {
            const double s = uni(rng) * 0.5 * R;
            const double offset = (2.0 * uni(rng) - 1.0) * 4.0 * eps;
            const double w = eps * (2.0 + 8.0 * uni(rng));
            const double amp = 2.0 * uni(rng) - 1.0;
            const Vec2 c = curve.point(s) + offset * curve.normal(s);
            const double margin = w + 2.0 * h;
            if (c.x() < margin || c.y() < margin || c.x() > R - margin || c.y() > R - margin) continue;
            const std::size_t i0 = static_cast<std::size_t>(std::floor((c.x() - w) / h));
            const std::size_t j0 = static_cast<std::size_t>(std::floor((c.y() - w) / h));
            const std::size_t i1 = static_cast<std::size_t>(std::ceil((c.x() + w) / h));
            const std::size_t j1 = static_cast<std::size_t>(std::ceil((c.y() + w) / h));
            for (std::size_t j = j0; j <= j1; ++j)
                for (std::size_t i = i0; i <= i1; ++i) {
                    const double dx = grid.coord(i) - c.x(), dy = grid.coord(j) - c.y();
                    const double q = 1.0 - (dx * dx + dy * dy) / (w * w);
                    if (q > 0.0) psi(i, j) += amp * q * q * q;
                }
            ++placed;
        }
        out.push_back(std::move(psi));
    }
    return out;
}

QuadraticTrial quadratic_form(const AssembledOperator& op, const ScalarField2D& phi,
                              const ScalarField2D& psi) {
    const Eigen::VectorXd x = op.restrict(psi);
    const Eigen::VectorXd f = op.restrict(phi);
    QuadraticTrial tr;
    tr.q = x.dot(op.matrix * x);
    tr.norm2 = x.cwiseProduct(op.volume).dot(x);
    for (Eigen::Index col = 0; col < op.matrix.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix, col); it; ++it) {
            const Eigen::Index row = it.row();
            if (row <= col) continue;
            if (x[row] == 0.0 && x[col] == 0.0) continue;
            const double g = x[row] / f[row] - x[col] / f[col];
            tr.rearranged += -it.value() * f[row] * f[col] * g * g;
        }
    const double scale = std::max(std::abs(tr.q), std::abs(tr.rearranged));
    tr.gap = scale > 0.0 ? std::abs(tr.q - tr.rearranged) / scale : 0.0;
    return tr;
}

std::vector<QuadraticTrial> quadratic_form_check(const ScalarField2D& u, double eps,
                                                 const ScalarField2D& phi,
                                                 const std::vector<ScalarField2D>& psis) {
    const AssembledOperator op = assemble_operator(u.grid(), eps, &u);
    std::vector<QuadraticTrial> out;
    out.reserve(psis.size());
    for (const ScalarField2D& psi : psis) out.push_back(quadratic_form(op, phi, psi));
    return out;
}

}  // namespace aclab
