#include "aclab/minsurf.hpp"

#include "aclab/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aclab {

namespace {

using State = std::array<double, 3>;

constexpr double kHalfPi = 1.57079632679489661923;

// Sixth-order central first difference.
constexpr std::array<double, 3> kD1 = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};

}  // namespace

std::array<double, 2> uv_rhs(const LinkSpec& spec, double u, double v) {
    return {std::cos(u) * std::sin(u) * std::sin(u - v),
            spec.n1 * std::sin(u) * std::sin(v) - spec.n2 * std::cos(u) * std::cos(v)};
}

EquivariantRhs equivariant_rhs(const LinkSpec& spec, double x, double y, double theta) {
    EquivariantRhs out;
    out.cartesian = cartesian_rhs(spec, x, y, theta);
    const double u = std::atan2(y, x);
    out.uv = uv_rhs(spec, u, theta);
    const double r = std::hypot(x, y);
    const double du_ds = (x * out.cartesian[1] - y * out.cartesian[0]) / (r * r);
    const double factor = -r * std::sin(u) * std::cos(u);
    out.uv_consistency = std::max(std::abs(out.uv[0] - factor * du_ds),
                                  std::abs(out.uv[1] - factor * out.cartesian[2]));
    return out;
}

double distance_to_cone(const LinkSpec& spec, double x, double y) {
    const double a = cone_angle(spec);
    return x * std::sin(a) - y * std::cos(a);
}

GeneratingCurve shoot_hardt_simon(const LinkSpec& spec, const ShootOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    spec.validate();
    if (!(opts.spacing > 0.0) || !(opts.tol > 0.0))
        throw InvalidArgument("shoot_hardt_simon: spacing and tol must be positive");
    if (!(opts.s_start > 0.0) || opts.s_start >= opts.spacing)
        throw InvalidArgument("shoot_hardt_simon: s_start must lie in (0, spacing)");
    if (!(opts.s_max > opts.spacing)) throw InvalidArgument("shoot_hardt_simon: s_max too small");

    const std::size_t count = static_cast<std::size_t>(std::floor(opts.s_max / opts.spacing)) + 1;
    std::vector<double> xs(count), ys(count), ths(count);
    xs[0] = 1.0;
    ys[0] = 0.0;
    ths[0] = kHalfPi;

    // Axis series: theta = pi/2 - a s + O(s^3), a = n1 / ((1 + n2) x0).
    const double x0 = 1.0;
    const double a = spec.n1 / ((1.0 + spec.n2) * x0);
    const double s0 = opts.s_start;
    State state = {x0 + 0.5 * a * s0 * s0, s0 - a * a * s0 * s0 * s0 / 6.0, kHalfPi - a * s0};

    std::vector<double> times;
    times.reserve(count);
    times.push_back(s0);
    for (std::size_t i = 1; i < count; ++i) times.push_back(opts.spacing * static_cast<double>(i));

    auto system = [&spec](const State& z, State& dz, double) {
        dz = cartesian_rhs(spec, z[0], z[1], z[2]);
    };
    std::size_t stored = 0;
    auto observer = [&](const State& z, double s) {
        if (s == s0) return;
        ++stored;
        if (!(z[1] > 0.0)) throw CrossingError("generating curve returned to the axis", s);
        if (!(distance_to_cone(spec, z[0], z[1]) > 0.0))
            throw CrossingError("generating curve crossed the cone", s);
        xs[stored] = z[0];
        ys[stored] = z[1];
        ths[stored] = z[2];
    };
    auto stepper = odeint::make_controlled(opts.tol, opts.tol,
                                           odeint::runge_kutta_fehlberg78<State>());
    try {
        odeint::integrate_times(stepper, system, state, times.begin(), times.end(),
                                0.1 * opts.spacing, observer);
    } catch (const DomainError&) {
        // A trial step left the quadrant: the curve is crossing an axis.
        throw CrossingError("generating curve left the open quadrant",
                            opts.spacing * static_cast<double>(stored + 1));
    }
    return GeneratingCurve(spec, opts.spacing, std::move(xs), std::move(ys), std::move(ths));
}

double PrincipalCurvatures::trace_power(int k) const {
    return std::pow(profile, k) + n1 * std::pow(type1, k) + n2 * std::pow(type2, k);
}

double PrincipalCurvatures::max_abs() const {
    return std::max({std::abs(profile), std::abs(type1), std::abs(type2)});
}

PrincipalCurvatures principal_curvatures(const LinkSpec& spec, double x, double y, double theta,
                                         double theta_prime, int orientation) {
    PrincipalCurvatures k;
    k.n1 = spec.n1;
    k.n2 = spec.n2;
    const double o = orientation >= 0 ? 1.0 : -1.0;
    k.profile = o * theta_prime;
    k.type1 = o * std::sin(theta) / x;
    // On the axis the second sphere degenerates and its curvature equals the profile one.
    k.type2 = y > 0.0 ? -o * std::cos(theta) / y : o * theta_prime;
    return k;
}

PrincipalCurvatures principal_curvatures(const GeneratingCurve& curve, double s) {
    const CurveState st = curve.at(s);
    return principal_curvatures(curve.spec(), st.x, st.y, st.theta, curve.theta_prime_at(s),
                                curve.orientation());
}

CurveGeometry curve_geometry(const GeneratingCurve& curve) {
    const std::size_t n = curve.size();
    const double h = curve.spacing();
    const LinkSpec& spec = curve.spec();
    CurveGeometry g;
    g.kappa_profile.resize(n);
    g.kappa_type1.resize(n);
    g.kappa_type2.resize(n);
    g.normA2.resize(n);
    g.d_gamma.resize(n);
    g.minimality_residual.assign(n, std::numeric_limits<double>::quiet_NaN());

    // theta - pi/2 is odd about the axis point, which supplies the ghost values.
    auto theta_ext = [&](long i) {
        if (i >= 0) return curve.theta(static_cast<std::size_t>(i));
        return 2.0 * kHalfPi - curve.theta(static_cast<std::size_t>(-i));
    };
    for (std::size_t i = 0; i < n; ++i) {
        const PrincipalCurvatures k = principal_curvatures(
            spec, curve.x(i), curve.y(i), curve.theta(i), curve.theta_prime(i), curve.orientation());
        g.kappa_profile[i] = k.profile;
        g.kappa_type1[i] = k.type1;
        g.kappa_type2[i] = k.type2;
        g.normA2[i] = k.norm2();
        g.d_gamma[i] = GeneratingCurve::d_gamma(curve.s(i));

        if (i + 3 >= n || i == 0) continue;
        const long li = static_cast<long>(i);
        double dtheta = 0.0;
        for (long m = 1; m <= 3; ++m)
            dtheta += kD1[static_cast<std::size_t>(m - 1)] * (theta_ext(li + m) - theta_ext(li - m));
        dtheta /= h;
        const double res = dtheta + spec.n1 * std::sin(curve.theta(i)) / curve.x(i) -
                           spec.n2 * std::cos(curve.theta(i)) / curve.y(i);
        g.minimality_residual[i] = res;
        g.max_minimality_residual = std::max(g.max_minimality_residual, std::abs(res));
    }
    // Unit speed measured on the samples: |dP/ds| by the same difference.
    for (std::size_t i = 3; i + 3 < n; ++i) {
        double dx = 0.0, dy = 0.0;
        for (std::size_t m = 1; m <= 3; ++m) {
            dx += kD1[m - 1] * (curve.x(i + m) - curve.x(i - m));
            dy += kD1[m - 1] * (curve.y(i + m) - curve.y(i - m));
        }
        dx /= h;
        dy /= h;
        g.max_speed_defect = std::max(g.max_speed_defect, std::abs(dx * dx + dy * dy - 1.0));
    }
    return g;
}

bool FoliationReport::ok() const {
    return polar_angle_monotone &&
           std::all_of(pairs.begin(), pairs.end(), [](const FoliationPair& p) { return p.disjoint; });
}

namespace {

// Signed offsets of the samples of `from` measured against `to`, restricted
// to radii where `to` is sampled with margin.
void scan_offsets(const GeneratingCurve& from, const CurveLocator& to, double& min_abs,
                  int& sign, bool& crossed) {
    const double r_end = std::hypot(to.curve().x(to.curve().size() - 1),
                                    to.curve().y(to.curve().size() - 1));
    const std::size_t stride = std::max<std::size_t>(1, from.size() / 4000);
    for (std::size_t i = 1; i < from.size(); i += stride) {
        const Vec2 p(from.x(i), from.y(i));
        if (p.norm() > 0.9 * r_end) break;
        const Projection pr = to.project(p);
        min_abs = std::min(min_abs, std::abs(pr.t));
        const int sg = pr.t > 0.0 ? 1 : (pr.t < 0.0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign)) crossed = true;
        if (sign == 0) sign = sg;
    }
}

}  // namespace

FoliationReport foliation_check(const GeneratingCurve& curve, const std::vector<double>& scales) {
    FoliationReport rep;
    for (double sc : scales)
        if (!(sc > 0.0)) throw InvalidArgument("foliation_check: scales must be positive");

    std::vector<GeneratingCurve> copies;
    copies.reserve(scales.size());
    for (double sc : scales) copies.push_back(curve.scaled(sc));

    for (std::size_t i = 0; i < scales.size(); ++i) {
        for (std::size_t j = i + 1; j < scales.size(); ++j) {
            FoliationPair pair;
            pair.scale_a = scales[i];
            pair.scale_b = scales[j];
            if (scales[i] == scales[j]) {
                rep.pairs.push_back(pair);
                continue;
            }
            const CurveLocator loc_a(copies[i]), loc_b(copies[j]);
            double min_abs = std::numeric_limits<double>::infinity();
            int sign_ab = 0, sign_ba = 0;
            bool crossed = false;
            scan_offsets(copies[i], loc_b, min_abs, sign_ab, crossed);
            scan_offsets(copies[j], loc_a, min_abs, sign_ba, crossed);
            pair.min_distance = min_abs;
            pair.disjoint = !crossed && min_abs > 0.0;
            rep.pairs.push_back(pair);
        }
    }

    rep.min_polar_angle_step = std::numeric_limits<double>::infinity();
    double prev = std::atan2(curve.y(0), curve.x(0));
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double u = std::atan2(curve.y(i), curve.x(i));
        rep.min_polar_angle_step = std::min(rep.min_polar_angle_step, u - prev);
        prev = u;
    }
    rep.polar_angle_monotone = rep.min_polar_angle_step > 0.0;
    return rep;
}

int ray_crossings(const GeneratingCurve& curve, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    // Side of the line through the origin; only forward intersections count.
    auto side = [&](std::size_t i) { return c * curve.y(i) - s * curve.x(i); };
    int count = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double a = side(i), b = side(i + 1);
        if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) {
            const double w = a / (a - b);
            const double px = curve.x(i) + w * (curve.x(i + 1) - curve.x(i));
            const double py = curve.y(i) + w * (curve.y(i + 1) - curve.y(i));
            if (px * c + py * s > 0.0) ++count;
        }
    }
    return count;
}

}  // namespace aclab
