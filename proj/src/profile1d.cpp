#include "aclab/profile1d.hpp"

#include "aclab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aclab {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
// |u1'| <= sqrt(2) e^{-sqrt(2)|t|}, so the integrands are below 1e-40 past this.
constexpr double kTruncation = 40.0;

// sech^2(a) without overflow for large |a|.
double sech2(double a) {
    const double e = std::exp(-2.0 * std::abs(a));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

// 1 - |tanh(a)| = 2 e^{-2|a|} / (1 + e^{-2|a|}).
double tanh_defect(double a) {
    const double e = std::exp(-2.0 * std::abs(a));
    return 2.0 * e / (1.0 + e);
}

// Solves (diag + shift-free tridiagonal) x = rhs in place, Thomas algorithm.
void solve_tridiagonal(std::span<const double> diag, double off, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double pivot = diag[0];
    if (pivot == 0.0) throw SingularSystemError("tridiagonal pivot vanished");
    c[0] = off / pivot;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - off * c[i - 1];
        if (pivot == 0.0) throw SingularSystemError("tridiagonal pivot vanished");
        c[i] = off / pivot;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

double inverse_iteration(const L0Grid& grid, double shift) {
    const std::size_t n = grid.size();
    const double h2 = grid.spacing * grid.spacing;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::tanh(grid.node(i) / kSqrt2);
        diag[i] = 2.0 / h2 - 1.0 + 3.0 * u * u - shift;
    }
    const double off = -1.0 / h2;

    // Start vector with both parities so neither eigenvector is missed.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid.node(i);
        x[i] = std::exp(-0.1 * t * t) * (1.0 + 0.3 * t);
    }
    double lambda = shift;
    for (int it = 0; it < 200; ++it) {
        std::vector<double> y = x;
        solve_tridiagonal(diag, off, y);
        const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        for (auto& v : y) v /= norm;
        // Rayleigh quotient of the unshifted operator.
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ay = (diag[i] + shift) * y[i];
            if (i > 0) ay += off * y[i - 1];
            if (i + 1 < n) ay += off * y[i + 1];
            num += y[i] * ay;
        }
        const bool done = std::abs(num - lambda) < 1e-14 * std::max(1.0, std::abs(num));
        lambda = num;
        x = std::move(y);
        if (done) return lambda;
    }
    return lambda;
}

}  // namespace

HeteroclinicProfile::HeteroclinicProfile(double eps) : eps_(eps) {
    if (!(eps > 0.0)) throw InvalidArgument("profile scale must be positive");
}

double HeteroclinicProfile::value(double t) const { return std::tanh(t / (eps_ * kSqrt2)); }

double HeteroclinicProfile::dot(double t) const { return sech2(t / (eps_ * kSqrt2)) / kSqrt2; }

double HeteroclinicProfile::ddot(double t) const { return -kSqrt2 * value(t) * dot(t); }

double HeteroclinicProfile::defect(double t) const { return tanh_defect(t / (eps_ * kSqrt2)); }

ProfileSample evaluate_profile(double t) {
    const HeteroclinicProfile p;
    ProfileSample s;
    s.u = p.value(t);
    s.du = p.dot(t);
    s.ddu = p.ddot(t);
    // 1 - u^2 = sech^2 = sqrt(2) u'; written this way the invariant carries no cancellation.
    const double one_minus_u2 = sech2(t / kSqrt2);
    s.energy = 2.0 * s.du * s.du - one_minus_u2 * one_minus_u2;
    return s;
}

ProfileMoments profile_moments(int K) {
    if (K < 0) throw InvalidArgument("profile_moments: K must be nonnegative");
    using boost::math::quadrature::gauss_kronrod;
    const HeteroclinicProfile p;
    auto moment = [&](int power) {
        auto f = [&](double t) {
            const double d = p.dot(t);
            return std::pow(t, power) * d * d;
        };
        // Even integrand: integrate the half line and double.
        return 2.0 * gauss_kronrod<double, 31>::integrate(f, 0.0, kTruncation, 20, 1e-15);
    };
    ProfileMoments m;
    m.c = moment(0);
    m.m2k.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) m.m2k.push_back(moment(2 * k));
    return m;
}

std::size_t L0Grid::size() const {
    return static_cast<std::size_t>(std::llround(2.0 * halfwidth / spacing)) - 1;
}

double L0Grid::node(std::size_t i) const {
    return -halfwidth + spacing * static_cast<double>(i + 1);
}

L0Spectrum l0_eigencheck(double grid_halfwidth, double spacing) {
    if (spacing > 0.05) throw InvalidArgument("l0_eigencheck: grid too coarse (spacing > 0.05)");
    if (!(spacing > 0.0)) throw InvalidArgument("l0_eigencheck: spacing must be positive");
    if (grid_halfwidth < 15.0) throw InvalidArgument("l0_eigencheck: halfwidth must be >= 15");

    const L0Grid grid{grid_halfwidth, spacing};
    L0Spectrum out;
    out.lambda0 = inverse_iteration(grid, 0.0);
    out.lambda1 = inverse_iteration(grid, 1.4);
    out.spectrum_edge = 2.0;

    // Closed-form eigen-identities, with S = sech(a), T = tanh(a), a = t / sqrt 2:
    // w0 = S^2, w0'' = 2 S^2 T^2 - S^4; w1 = T S, w1'' = (S T^3 - 5 S^3 T) / 2.
    for (double t = -grid_halfwidth; t <= grid_halfwidth; t += spacing) {
        const double a = t / kSqrt2;
        const double S2 = sech2(a);
        const double S = std::sqrt(S2);
        const double T = std::tanh(a);
        const double w0 = S2;
        const double w0pp = 2.0 * S2 * T * T - S2 * S2;
        const double w1 = T * S;
        const double w1pp = 0.5 * (S * T * T * T - 5.0 * S2 * S * T);
        const double pot = 1.0 - 3.0 * T * T;
        out.w0_identity_residual = std::max(out.w0_identity_residual, std::abs(-w0pp - pot * w0));
        out.w1_identity_residual =
            std::max(out.w1_identity_residual, std::abs(-w1pp - pot * w1 - 1.5 * w1));
    }
    return out;
}

double l0_quadratic_form(const L0Grid& grid, std::span<const double> w) {
    const std::size_t n = grid.size();
    if (w.size() != n) throw InvalidArgument("l0_quadratic_form: size mismatch");
    const double h = grid.spacing;
    double grad = w.front() * w.front() + w.back() * w.back();
    for (std::size_t i = 0; i + 1 < n; ++i) grad += (w[i + 1] - w[i]) * (w[i + 1] - w[i]);
    double pot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::tanh(grid.node(i) / kSqrt2);
        pot += (3.0 * u * u - 1.0) * w[i] * w[i];
    }
    return grad / h + h * pot;
}

void project_out_translation(const L0Grid& grid, std::span<double> w) {
    const HeteroclinicProfile p;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = p.dot(grid.node(i));
        num += w[i] * d;
        den += d * d;
    }
    const double coef = num / den;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= coef * p.dot(grid.node(i));
}

}  // namespace aclab
