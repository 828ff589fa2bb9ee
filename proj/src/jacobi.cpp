#include "aclab/jacobi.hpp"

#include "aclab/error.hpp"
#include "aclab/minsurf.hpp"

#include <algorithm>
#include <cmath>

namespace aclab {

namespace {

// Three-point Gauss-Legendre on [-1, 1].
constexpr double kGaussNode = 0.77459666924148337704;
constexpr std::array<double, 3> kGaussWeight = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double weight_at(const GeneratingCurve& c, double s) {
    const CurveState st = c.at(s);
    return std::pow(st.x, c.spec().n1) * std::pow(std::max(st.y, 0.0), c.spec().n2);
}

double integrate_weight(const GeneratingCurve& c, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const std::array<double, 3> nodes = {-kGaussNode, 0.0, kGaussNode};
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += kGaussWeight[k] * weight_at(c, mid + half * nodes[k]);
    return half * sum;
}

// Face weights w(s_{i+1/2}) / h and cell volumes, shared by apply and solve.
struct Stencil {
    std::vector<double> face;    // size n - 1
    std::vector<double> volume;  // size n, last entry unused
    std::vector<double> potential;
};

Stencil build_stencil(const GeneratingCurve& c) {
    const std::size_t n = c.size();
    const double h = c.spacing();
    Stencil st;
    st.face.resize(n - 1);
    st.volume.assign(n, 0.0);
    st.potential.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) st.face[i] = weight_at(c, c.s(i) + 0.5 * h) / h;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = std::max(0.0, c.s(i) - 0.5 * h);
        const double hi = std::min(c.length(), c.s(i) + 0.5 * h);
        // Split at the node so each Gauss rule sees a smooth integrand.
        st.volume[i] = (i > 0 ? integrate_weight(c, lo, c.s(i)) : 0.0) +
                       (i + 1 < n ? integrate_weight(c, c.s(i), hi) : 0.0);
        st.potential[i] = principal_curvatures(c.spec(), c.x(i), c.y(i), c.theta(i),
                                               c.theta_prime(i), c.orientation())
                              .norm2();
    }
    return st;
}

}  // namespace

JacobiApplication jacobi_apply(const GeneratingCurve& curve, std::span<const double> zeta) {
    const std::size_t n = curve.size();
    if (zeta.size() != n) throw InvalidArgument("jacobi_apply: zeta must be sampled on the curve grid");
    if (n < 4) throw InvalidArgument("jacobi_apply: curve too short");
    const Stencil st = build_stencil(curve);
    JacobiApplication out;
    out.values.resize(n);
    out.one_sided.assign(n, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double flux = st.face[i] * (zeta[i + 1] - zeta[i]);
        if (i > 0) flux -= st.face[i - 1] * (zeta[i] - zeta[i - 1]);
        out.values[i] = flux / st.volume[i] + st.potential[i] * zeta[i];
    }
    const std::size_t k = n - 1;
    const double h = curve.spacing();
    const double d1 = (3.0 * zeta[k] - 4.0 * zeta[k - 1] + zeta[k - 2]) / (2.0 * h);
    const double d2 = (2.0 * zeta[k] - 5.0 * zeta[k - 1] + 4.0 * zeta[k - 2] - zeta[k - 3]) / (h * h);
    const LinkSpec& sp = curve.spec();
    const double log_w =
        sp.n1 * std::cos(curve.theta(k)) / curve.x(k) + sp.n2 * std::sin(curve.theta(k)) / curve.y(k);
    out.values[k] = d2 + log_w * d1 + st.potential[k] * zeta[k];
    out.one_sided[k] = true;
    return out;
}

JacobiApplication jacobi_apply(const GeneratingCurve& curve,
                               const std::function<double(double)>& zeta) {
    std::vector<double> z(curve.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = zeta(curve.s(i));
    return jacobi_apply(curve, z);
}

double jacobi_scaled_residual(const GeneratingCurve& curve, std::span<const double> zeta,
                              const JacobiApplication& jz) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        if (jz.one_sided[i]) continue;
        const double d = GeneratingCurve::d_gamma(curve.s(i));
        num = std::max(num, std::abs(jz.values[i]));
        den = std::max(den, std::abs(zeta[i]) / (d * d));
    }
    return den > 0.0 ? num / den : num;
}

JacobiSolution jacobi_solve(const GeneratingCurve& curve, std::span<const double> f,
                            const JacobiBoundary& boundary) {
    const std::size_t n = curve.size();
    if (f.size() != n) throw InvalidArgument("jacobi_solve: f must be sampled on the curve grid");
    const Stencil st = build_stencil(curve);

    // Rows of M = -V J (symmetric), unknowns 0..n-2 with Dirichlet at n-1.
    const std::size_t first = boundary.inner ? 1 : 0;
    const std::size_t last = n - 2;
    std::vector<double> zeta(n, 0.0);
    zeta[n - 1] = boundary.outer;
    if (boundary.inner) zeta[0] = *boundary.inner;

    const std::size_t m = last - first + 1;
    std::vector<double> diag(m), off(m, 0.0), rhs(m), scale(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = first + r;
        const double left = i > 0 ? st.face[i - 1] : 0.0;
        const double right = st.face[i];
        diag[r] = left + right - st.volume[i] * st.potential[i];
        scale[r] = left + right + st.volume[i] * std::abs(st.potential[i]);
        rhs[r] = -st.volume[i] * f[i];
        if (r + 1 < m) off[r] = -right;
        if (i == first && boundary.inner) rhs[r] += left * zeta[0];
        if (i == last) rhs[r] += right * zeta[n - 1];
    }
    // Thomas elimination; without pivoting, a collapsing pivot signals a near kernel.
    std::vector<double> c(m);
    double pivot = diag[0];
    // Rows scale like w, which spans many decades; compare each pivot to its own row.
    auto check = [&](double p, std::size_t r) {
        if (!(std::abs(p) > 1e-13 * scale[r]))
            throw SingularSystemError("jacobi_solve: singular system");
    };
    check(pivot, 0);
    c[0] = off[0] / pivot;
    rhs[0] /= pivot;
    for (std::size_t r = 1; r < m; ++r) {
        pivot = diag[r] - off[r - 1] * c[r - 1];
        check(pivot, r);
        c[r] = off[r] / pivot;
        rhs[r] = (rhs[r] - off[r - 1] * rhs[r - 1]) / pivot;
    }
    for (std::size_t r = m - 1; r-- > 0;) rhs[r] -= c[r] * rhs[r + 1];
    for (std::size_t r = 0; r < m; ++r) zeta[first + r] = rhs[r];

    JacobiSolution sol;
    const JacobiApplication jz = jacobi_apply(curve, zeta);
    for (std::size_t i = first; i <= last; ++i)
        sol.residual = std::max(sol.residual, std::abs(jz.values[i] - f[i]));
    sol.zeta = std::move(zeta);
    return sol;
}

std::vector<double> dilation_field(const GeneratingCurve& curve) {
    std::vector<double> z(curve.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = curve.zeta0(i);
    return z;
}

}  // namespace aclab
