#include "aclab/fermi.hpp"

#include "aclab/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>

namespace aclab {

namespace {

double profile_constant() {
    static const double c = profile_moments(0).c;
    return c;
}

double smoothstep_slope(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (x - 1.0) * (x - 1.0);
}

struct CutoffBand {
    double inner;
    double width;
};

CutoffBand cutoff_band(int j, double foot, const CutoffParams& p) {
    if (j < 1 || j > 5) throw InvalidArgument("cutoff_chi: j must be in 1..5");
    const double scale = std::pow(p.eps, p.delta_star);
    const double d = GeneratingCurve::d_gamma(foot);
    return {scale * (d - (2.0 * j - 1.0) / 100.0), scale / 100.0};
}

// Offsets of the lattice points inside a disc of the given radius (in cells).
std::vector<std::pair<long, long>> disc_offsets(double radius_cells) {
    const long r = static_cast<long>(std::floor(radius_cells));
    std::vector<std::pair<long, long>> out;
    for (long dj = -r; dj <= r; ++dj)
        for (long di = -r; di <= r; ++di)
            if (static_cast<double>(di * di + dj * dj) <= radius_cells * radius_cells + 1e-9)
                out.emplace_back(di, dj);
    return out;
}

double local_sup(const ScalarField2D& w, std::size_t i, std::size_t j,
                 const std::vector<std::pair<long, long>>& offsets) {
    const long n = static_cast<long>(w.grid().side());
    double m = 0.0;
    for (const auto& [di, dj] : offsets) {
        const long a = static_cast<long>(i) + di, b = static_cast<long>(j) + dj;
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        m = std::max(m, std::abs(w(static_cast<std::size_t>(a), static_cast<std::size_t>(b))));
    }
    return m;
}

}  // namespace

TubularMap::TubularMap(const GeneratingCurve& curve, double c_star)
    : curve_(&curve), locator_(curve), c_star_(c_star) {
    if (!(c_star > 0.0)) throw InvalidArgument("TubularMap: c_star must be positive");
}

TubePoint TubularMap::locate(const Vec2& p) const {
    const Projection pr = locator_.project(p);
    TubePoint tp;
    tp.foot = pr.foot;
    tp.t = pr.t;
    tp.perpendicularity = pr.perpendicularity;
    tp.valid = !pr.at_far_end && std::abs(pr.t) <= c_star_ * GeneratingCurve::d_gamma(pr.foot);
    return tp;
}

Vec2 TubularMap::point(double foot, double t) const {
    return curve_->point(foot) + t * curve_->normal(foot);
}

TubePoint signed_distance(const Vec2& p, const TubularMap& map) { return map.locate(p); }

TubeCoordinates tube_coordinates(const Grid2D& grid, const TubularMap& map) {
    TubeCoordinates tc;
    tc.foot.resize(grid.size());
    tc.t.resize(grid.size());
    tc.d_gamma.resize(grid.size());
    tc.valid.resize(grid.size());
    for (std::size_t j = 0; j < grid.side(); ++j) {
        for (std::size_t i = 0; i < grid.side(); ++i) {
            const std::size_t k = grid.index(i, j);
            const TubePoint tp = map.locate(Vec2(grid.coord(i), grid.coord(j)));
            tc.foot[k] = tp.foot;
            tc.t[k] = tp.t;
            tc.d_gamma[k] = GeneratingCurve::d_gamma(tp.foot);
            tc.valid[k] = tp.valid;
        }
    }
    return tc;
}

ParallelMeanCurvature parallel_mean_curvature(const PrincipalCurvatures& k, double z, int order) {
    if (std::abs(z) * k.max_abs() >= 1.0)
        throw DomainError("parallel_mean_curvature: |z kappa| >= 1");
    if (order < 1) throw InvalidArgument("parallel_mean_curvature: order must be >= 1");
    ParallelMeanCurvature out;
    out.exact = k.profile / (1.0 - z * k.profile) + k.n1 * k.type1 / (1.0 - z * k.type1) +
                k.n2 * k.type2 / (1.0 - z * k.type2);
    double zj = 1.0;
    for (int j = 1; j <= order; ++j) {
        zj *= z;
        out.series += k.trace_power(j + 1) * zj;
    }
    return out;
}

ParallelMeanCurvature parallel_mean_curvature(const GeneratingCurve& curve, double s, double z,
                                              int order) {
    return parallel_mean_curvature(principal_curvatures(curve, s), z, order);
}

double series_tail_bound(const PrincipalCurvatures& k, double z, int order) {
    const double q = std::abs(z) * k.max_abs();
    if (q >= 1.0) throw DomainError("series_tail_bound: |z kappa| >= 1");
    const double sum_abs =
        std::abs(k.profile) + k.n1 * std::abs(k.type1) + k.n2 * std::abs(k.type2);
    return sum_abs * std::pow(q, order + 1) / (1.0 - q);
}

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double cutoff_chi(int j, double foot, double t, const CutoffParams& p) {
    const CutoffBand b = cutoff_band(j, foot, p);
    return 1.0 - smoothstep((std::abs(t) - b.inner) / b.width);
}

double cutoff_chi_dt(int j, double foot, double t, const CutoffParams& p) {
    const CutoffBand b = cutoff_band(j, foot, p);
    const double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    return -smoothstep_slope((std::abs(t) - b.inner) / b.width) * sign / b.width;
}

ScalarField2D build_approx_solution(const Grid2D& grid, const TubeCoordinates& tube,
                                    const ApproxOptions& opts) {
    if (!(opts.eps > 0.0) || opts.eps > 0.5)
        throw InvalidArgument("build_approx_solution: eps must lie in (0, 0.5]");
    const HeteroclinicProfile prof(opts.eps);
    const CutoffParams cp{opts.eps, opts.delta_star};
    const double plus = opts.plus_side >= 0 ? 1.0 : -1.0;
    ScalarField2D u(grid);
    auto& v = u.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double t = tube.t[k];
        const double chi = cutoff_chi(1, tube.foot[k], t, cp);
        const double side = t > 0.0 ? plus : (t < 0.0 ? -plus : 0.0);
        v[k] = chi == 0.0 ? side : chi * plus * prof.value(t) + (1.0 - chi) * side;
    }
    return u;
}

double inner_residual(const GeneratingCurve& curve, double s, double t, double eps) {
    const HeteroclinicProfile prof(eps);
    const double H = parallel_mean_curvature(curve, s, t, 1).exact;
    return -eps * H * prof.dot(t);
}

double inner_residual_sup(const GeneratingCurve& curve, double s, double eps, double c_star) {
    const PrincipalCurvatures k = principal_curvatures(curve, s);
    const HeteroclinicProfile prof(eps);
    const double T = c_star * GeneratingCurve::d_gamma(s);
    const double dt = eps / 50.0;
    const long n = static_cast<long>(std::ceil(T / dt));
    double m = 0.0;
    for (long i = -n; i <= n; ++i) {
        const double t = std::clamp(static_cast<double>(i) * dt, -T, T);
        const double H = parallel_mean_curvature(k, t, 1).exact;
        m = std::max(m, std::abs(eps * H * prof.dot(t)));
    }
    return m;
}

PiValue project_pi(const std::function<double(double)>& f_of_t, double d_gamma, double eps,
                   double c_star) {
    using boost::math::quadrature::gauss;
    const HeteroclinicProfile prof(eps);
    const double a = c_star * d_gamma;
    auto integrand = [&](double t) {
        const double chi = 1.0 - smoothstep((t - a) / a);
        return (f_of_t(t) + f_of_t(-t)) * prof.dot(t) * chi;
    };
    // Panels of width at most eps / 2, with a break where the taper starts.
    auto panels = [&](double lo, double hi) {
        const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.5 * eps))));
        const double w = (hi - lo) / count;
        double sum = 0.0;
        for (int p = 0; p < count; ++p)
            sum += gauss<double, 10>::integrate(integrand, lo + p * w, lo + (p + 1) * w);
        return sum;
    };
    PiValue out;
    out.value = (panels(0.0, a) + panels(a, 2.0 * a)) / (eps * profile_constant());
    out.truncated = 2.0 * a < 10.0 * eps;
    return out;
}

PiValue project_pi(const GeneratingCurve& curve, const std::function<double(double, double)>& f,
                   double s, double eps, double c_star) {
    if (s < 0.0 || s > curve.length()) throw InvalidArgument("project_pi: s outside the curve");
    return project_pi([&](double t) { return f(s, t); }, GeneratingCurve::d_gamma(s), eps, c_star);
}

PiValue projected_inner_residual(const GeneratingCurve& curve, double s, double eps,
                                 double c_star) {
    const PrincipalCurvatures k = principal_curvatures(curve, s);
    const HeteroclinicProfile prof(eps);
    return project_pi(
        [&](double t) { return -eps * parallel_mean_curvature(k, t, 1).exact * prof.dot(t); },
        GeneratingCurve::d_gamma(s), eps, c_star);
}

double project_pi_perp(const GeneratingCurve& curve, const std::function<double(double, double)>& f,
                       double s, double t, double eps, double c_star) {
    const HeteroclinicProfile prof(eps);
    return f(s, t) - project_pi(curve, f, s, eps, c_star).value * prof.dot(t);
}

ScalarField2D apply_dzeta(const ScalarField2D& field, const TubularMap& map,
                          const TubeCoordinates& tube, const std::function<double(double)>& zeta,
                          const CutoffParams& cutoff, Direction direction) {
    const auto& in = field.values();
    const std::size_t n = in.size();
    std::vector<double> z(n, 0.0);
    double zmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = zeta(tube.foot[k]);
        zmax = std::max(zmax, std::abs(z[k]));
    }
    // Largest |d chi_2 / dt| is 15/8 over the band width.
    const double slope = 1.875 * 100.0 / std::pow(cutoff.eps, cutoff.delta_star);
    if (zmax * slope >= 1.0)
        throw DomainError("apply_dzeta: t -> t - chi_2 zeta is not monotone");

    ScalarField2D out(field.grid());
    auto& v = out.values();
    for (std::size_t k = 0; k < n; ++k) {
        const double foot = tube.foot[k], t = tube.t[k], zk = z[k];
        if (zk == 0.0) {
            v[k] = in[k];
            continue;
        }
        double target = t;
        if (direction == Direction::forward) {
            target = t - cutoff_chi(2, foot, t, cutoff) * zk;
        } else {
            if (cutoff_chi(2, foot, t, cutoff) == 0.0) {
                v[k] = in[k];
                continue;
            }
            auto g = [&](double tau) { return tau - cutoff_chi(2, foot, tau, cutoff) * zk - t; };
            boost::uintmax_t iters = 100;
            // Twice |zeta| keeps the end values clear of rounding.
            const double span = 2.0 * std::abs(zk);
            if (!(t - span < t + span)) {
                // zeta below the resolution of t: the shift is the identity in floating point.
                v[k] = in[k];
                continue;
            }
            const auto root = boost::math::tools::toms748_solve(
                g, t - span, t + span, boost::math::tools::eps_tolerance<double>(50), iters);
            target = 0.5 * (root.first + root.second);
        }
        if (target == t) {
            v[k] = in[k];
            continue;
        }
        const Vec2 q = map.point(foot, target);
        v[k] = field.interpolate(q.x(), q.y());
    }
    return out;
}

double weighted_norm_curve(const GeneratingCurve& curve, std::span<const double> w, double nu,
                           double ball_radius) {
    if (w.size() != curve.size()) throw InvalidArgument("weighted_norm_curve: size mismatch");
    const long reach = static_cast<long>(std::floor(ball_radius / curve.spacing() + 1e-9));
    const long n = static_cast<long>(w.size());
    double out = 0.0;
    for (long i = 0; i < n; ++i) {
        double m = 0.0;
        for (long j = std::max(0L, i - reach); j <= std::min(n - 1, i + reach); ++j)
            m = std::max(m, std::abs(w[static_cast<std::size_t>(j)]));
        const double d = GeneratingCurve::d_gamma(curve.s(static_cast<std::size_t>(i)));
        out = std::max(out, std::pow(d, -nu) * m);
    }
    return out;
}

double weighted_norm_tube(const ScalarField2D& w, const TubeCoordinates& tube, double nu,
                          double ball_radius) {
    const Grid2D& g = w.grid();
    const auto offsets = disc_offsets(ball_radius / g.spacing());
    double out = 0.0;
    for (std::size_t j = 0; j < g.side(); ++j)
        for (std::size_t i = 0; i < g.side(); ++i) {
            const std::size_t k = g.index(i, j);
            if (!tube.valid[k]) continue;
            out = std::max(out, std::pow(tube.d_gamma[k], -nu) * local_sup(w, i, j, offsets));
        }
    return out;
}

double weighted_norm_ambient(const ScalarField2D& w, double nu, double ball_radius) {
    const Grid2D& g = w.grid();
    const auto offsets = disc_offsets(ball_radius / g.spacing());
    double out = 0.0;
    for (std::size_t j = 0; j < g.side(); ++j)
        for (std::size_t i = 0; i < g.side(); ++i) {
            const double r2 = g.coord(i) * g.coord(i) + g.coord(j) * g.coord(j);
            out = std::max(out, std::pow(1.0 + r2, -0.5 * nu) * local_sup(w, i, j, offsets));
        }
    return out;
}

}  // namespace aclab
