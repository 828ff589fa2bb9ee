#include "aclab/acpde.hpp"

#include "aclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aclab {

namespace {

// Rows of eps^2 Delta_red in flux form: sum_k c_k (v_k - v_0) / V_0.
template <typename Visit>
void for_each_face(const Grid2D& g, std::size_t i, std::size_t j, Visit&& visit) {
    const double h = g.spacing();
    if (i > 0) visit(i - 1, j, g.face1(i - 1) * g.volume2(j) / h);
    if (i < g.cells()) visit(i + 1, j, g.face1(i) * g.volume2(j) / h);
    if (j > 0) visit(i, j - 1, g.face2(j - 1) * g.volume1(i) / h);
    if (j < g.cells()) visit(i, j + 1, g.face2(j) * g.volume1(i) / h);
}

}  // namespace

AssembledOperator assemble_operator(const Grid2D& grid, double eps, const ScalarField2D* u) {
    grid.check_resolution(eps);
    if (u && u->values().size() != grid.size())
        throw InvalidArgument("assemble_operator: field does not match grid");
    AssembledOperator op;
    op.grid = grid;
    op.eps = eps;
    op.potential.assign(grid.size(), 0.0);
    if (u)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double v = u->values()[k];
            op.potential[k] = 1.0 - 3.0 * v * v;
        }

    op.unknown.assign(grid.size(), -1);
    for (std::size_t j = 0; j < grid.cells(); ++j)
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            op.unknown[grid.index(i, j)] = static_cast<long>(op.node.size());
            op.node.push_back(grid.index(i, j));
        }
    const std::size_t n = op.node.size();
    op.volume.resize(static_cast<Eigen::Index>(n));

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    const double e2 = eps * eps;
    for (std::size_t j = 0; j < grid.cells(); ++j)
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            const std::size_t k = grid.index(i, j);
            const long r = op.unknown[k];
            const double V = grid.cell_volume(i, j);
            op.volume[r] = V;
            double diag = -V * op.potential[k];
            for_each_face(grid, i, j, [&](std::size_t a, std::size_t b, double c) {
                diag += e2 * c;
                const long col = op.unknown[grid.index(a, b)];
                if (col >= 0) trip.emplace_back(r, col, -e2 * c);
            });
            trip.emplace_back(r, r, diag);
        }
    op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    return op;
}

ScalarField2D AssembledOperator::apply(const ScalarField2D& v) const {
    ScalarField2D out(grid);
    const double e2 = eps * eps;
    for (std::size_t j = 0; j < grid.cells(); ++j)
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            const double v0 = v(i, j);
            double flux = 0.0;
            for_each_face(grid, i, j,
                          [&](std::size_t a, std::size_t b, double c) { flux += c * (v(a, b) - v0); });
            out(i, j) = e2 * flux / grid.cell_volume(i, j) + potential[grid.index(i, j)] * v0;
        }
    return out;
}

Eigen::VectorXd AssembledOperator::restrict(const ScalarField2D& v) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(node.size()));
    for (std::size_t r = 0; r < node.size(); ++r) x[static_cast<Eigen::Index>(r)] = v.values()[node[r]];
    return x;
}

ScalarField2D AssembledOperator::prolong(const Eigen::VectorXd& x, const ScalarField2D& base) const {
    ScalarField2D out = base;
    for (std::size_t r = 0; r < node.size(); ++r) out.values()[node[r]] = x[static_cast<Eigen::Index>(r)];
    return out;
}

PdeResidual pde_residual(const Grid2D& grid, double eps, const ScalarField2D& u) {
    const AssembledOperator lap = assemble_operator(grid, eps, nullptr);
    PdeResidual res;
    res.field = lap.apply(u);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.cells(); ++j)
        for (std::size_t i = 0; i < grid.cells(); ++i) {
            const double v = u(i, j);
            double& r = res.field(i, j);
            r += v - v * v * v;
            res.sup_norm = std::max(res.sup_norm, std::abs(r));
            const double V = grid.cell_volume(i, j);
            num += V * r * r;
            den += V;
        }
    res.weighted_l2 = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return res;
}

void SymmetricSolver::compute(const Eigen::SparseMatrix<double>& K) {
    if (!analyzed_) {
        ldlt_.analyzePattern(K);
        analyzed_ = true;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw SingularSystemError("sparse LDLT factorization failed");
    const auto& d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] == 0.0 || !std::isfinite(d[i])) throw SingularSystemError("sparse LDLT: zero pivot");
}

Eigen::VectorXd SymmetricSolver::solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

std::size_t SymmetricSolver::factor_nonzeros() const {
    return static_cast<std::size_t>(ldlt_.matrixL().nestedExpression().nonZeros());
}

std::size_t SymmetricSolver::negative_pivots() const {
    const auto& d = ldlt_.vectorD();
    return static_cast<std::size_t>((d.array() < 0.0).count());
}

ScalarField2D newton_solve(const Grid2D& grid, double eps, const ScalarField2D& init,
                           const NewtonOptions& opts, NewtonReport& report) {
    grid.check_resolution(eps);
    if (init.values().size() != grid.size()) throw InvalidArgument("newton_solve: grid mismatch");
    for (double v : init.values())
        if (!(std::abs(v) <= 1.1)) throw InvalidArgument("newton_solve: init outside [-1.1, 1.1]");

    report = NewtonReport{};
    ScalarField2D u = init;
    PdeResidual res = pde_residual(grid, eps, u);
    report.residuals.push_back(res.sup_norm);
    SymmetricSolver solver;

    while (res.sup_norm >= opts.tol) {
        if (report.iterations >= opts.maxit) {
            std::ostringstream msg;
            msg << "newton_solve: no convergence after " << opts.maxit
                << " iterations, sup residual " << res.sup_norm;
            throw ConvergenceError(msg.str());
        }
        const AssembledOperator J = assemble_operator(grid, eps, &u);
        report.unknowns = J.node.size();
        solver.compute(J.matrix);
        report.factor_nonzeros = solver.factor_nonzeros();
        // K delta = V F, since K = -V J.
        const Eigen::VectorXd rhs = J.volume.cwiseProduct(J.restrict(res.field));
        const Eigen::VectorXd delta = solver.solve(rhs);
        const Eigen::VectorXd base = J.restrict(u);

        double step = 1.0;
        ScalarField2D trial;
        PdeResidual trial_res;
        while (true) {
            trial = J.prolong(base + step * delta, u);
            trial_res = pde_residual(grid, eps, trial);
            if (trial_res.sup_norm < (1.0 - 1e-4 * step) * res.sup_norm || step <= opts.min_step)
                break;
            step *= 0.5;
        }
        u = std::move(trial);
        res = std::move(trial_res);
        ++report.iterations;
        report.residuals.push_back(res.sup_norm);
        report.step_lengths.push_back(step);
    }
    report.converged = true;
    report.final_sup_residual = res.sup_norm;
    report.max_abs = u.sup_norm();
    return u;
}

}  // namespace aclab
