#include "aclab/curve.hpp"

#include "aclab/error.hpp"

#include <algorithm>

namespace aclab {

namespace {

struct HermiteWeights {
    double p0, m0, a0, a1, m1, p1;
};

// Quintic Hermite basis on [0, 1]; derivative data must be pre-scaled by h, h^2.
HermiteWeights quintic(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return {1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5};
}

}  // namespace

Vec2 CurveState::tangent() const { return {std::cos(theta), std::sin(theta)}; }

std::array<double, 3> cartesian_rhs(const LinkSpec& spec, double x, double y, double theta) {
    if (!(x > 0.0) || !(y > 0.0))
        throw DomainError("cartesian_rhs: state outside the open quadrant");
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, s, spec.n2 * c / y - spec.n1 * s / x};
}

GeneratingCurve::GeneratingCurve(LinkSpec spec, double spacing, std::vector<double> x,
                                 std::vector<double> y, std::vector<double> theta,
                                 int orientation)
    : spec_(spec),
      spacing_(spacing),
      x_(std::move(x)),
      y_(std::move(y)),
      theta_(std::move(theta)),
      orientation_(orientation >= 0 ? 1 : -1) {
    spec_.validate();
    if (!(spacing_ > 0.0)) throw InvalidArgument("GeneratingCurve: spacing must be positive");
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != theta_.size())
        throw InvalidArgument("GeneratingCurve: inconsistent sample arrays");
}

double GeneratingCurve::theta_prime(std::size_t i) const {
    if (y_[i] <= 0.0) return -spec_.n1 / ((1.0 + spec_.n2) * x_[i]);
    const double c = std::cos(theta_[i]), s = std::sin(theta_[i]);
    return spec_.n2 * c / y_[i] - spec_.n1 * s / x_[i];
}

double GeneratingCurve::theta_second(std::size_t i) const {
    // theta - pi/2 is odd in s at the axis point.
    if (y_[i] <= 0.0) return 0.0;
    const double c = std::cos(theta_[i]), s = std::sin(theta_[i]);
    const double x = x_[i], y = y_[i];
    const double tp = theta_prime(i);
    return -spec_.n2 * s * tp / y - spec_.n2 * c * s / (y * y) - spec_.n1 * c * tp / x +
           spec_.n1 * s * c / (x * x);
}

CurveState GeneratingCurve::at(double s) const {
    const double sc = std::clamp(s, 0.0, length());
    std::size_t i = static_cast<std::size_t>(sc / spacing_);
    i = std::min(i, size() - 2);
    const double t = (sc - static_cast<double>(i) * spacing_) / spacing_;
    const HermiteWeights w = quintic(t);
    const double h = spacing_, h2 = h * h;

    const double th0 = theta_[i], th1 = theta_[i + 1];
    const double tp0 = theta_prime(i), tp1 = theta_prime(i + 1);
    const double c0 = std::cos(th0), s0 = std::sin(th0);
    const double c1 = std::cos(th1), s1 = std::sin(th1);

    auto blend = [&](double p0, double d0, double dd0, double p1, double d1, double dd1) {
        return w.p0 * p0 + w.m0 * h * d0 + w.a0 * h2 * dd0 + w.a1 * h2 * dd1 + w.m1 * h * d1 +
               w.p1 * p1;
    };
    CurveState out;
    out.s = sc;
    out.x = blend(x_[i], c0, -s0 * tp0, x_[i + 1], c1, -s1 * tp1);
    out.y = blend(y_[i], s0, c0 * tp0, y_[i + 1], s1, c1 * tp1);
    out.theta = blend(th0, tp0, theta_second(i), th1, tp1, theta_second(i + 1));
    return out;
}

double GeneratingCurve::theta_prime_at(double s) const {
    const CurveState st = at(s);
    if (st.y <= 1e-300) return theta_prime(0);
    return spec_.n2 * std::cos(st.theta) / st.y - spec_.n1 * std::sin(st.theta) / st.x;
}

Vec2 GeneratingCurve::normal(double s) const {
    const CurveState st = at(s);
    return orientation_ * Vec2(-std::sin(st.theta), std::cos(st.theta));
}

GeneratingCurve GeneratingCurve::scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidArgument("GeneratingCurve::scaled: factor must be positive");
    std::vector<double> x(x_), y(y_);
    for (auto& v : x) v *= factor;
    for (auto& v : y) v *= factor;
    return GeneratingCurve(spec_, spacing_ * factor, std::move(x), std::move(y), theta_,
                           orientation_);
}

double GeneratingCurve::zeta0(std::size_t i) const {
    return orientation_ * (-x_[i] * std::sin(theta_[i]) + y_[i] * std::cos(theta_[i]));
}

double GeneratingCurve::zeta0_at(double s) const {
    const CurveState st = at(s);
    return orientation_ * (-st.x * std::sin(st.theta) + st.y * std::cos(st.theta));
}

}  // namespace aclab

namespace aclab {

CurveLocator::CurveLocator(const GeneratingCurve& curve, double coarse_spacing) : curve_(&curve) {
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(coarse_spacing / curve.spacing()));
    for (std::size_t i = 0; i < curve.size(); i += stride) {
        s_.push_back(curve.s(i));
        pts_.emplace_back(curve.x(i), curve.y(i));
    }
    if (s_.back() < curve.length()) {
        s_.push_back(curve.length());
        pts_.emplace_back(curve.x(curve.size() - 1), curve.y(curve.size() - 1));
    }
    radius_.reserve(pts_.size());
    for (const Vec2& q : pts_) radius_.push_back(q.norm());
    monotone_ = std::adjacent_find(radius_.begin(), radius_.end(), std::greater_equal<>()) ==
                radius_.end();
}

double CurveLocator::refine(const Vec2& p, double s_lo, double s_guess, double s_hi) const {
    // Newton on g(s) = (p - c(s)) . T(s), safeguarded by the bracket.
    const GeneratingCurve& c = *curve_;
    auto g = [&](double s, double& dg) {
        const CurveState st = c.at(s);
        const Vec2 d = p - st.point();
        const Vec2 T(std::cos(st.theta), std::sin(st.theta));
        const Vec2 N(-T.y(), T.x());
        dg = -1.0 + c.theta_prime_at(s) * d.dot(N);
        return d.dot(T);
    };
    double dg = 0.0;
    double glo = g(s_lo, dg), ghi = g(s_hi, dg);
    double s = s_guess;
    for (int it = 0; it < 60; ++it) {
        const double gs = g(s, dg);
        if (gs == 0.0) return s;
        // Maintain a sign-change bracket when one exists.
        if ((gs > 0) == (glo > 0)) {
            s_lo = s;
            glo = gs;
        } else {
            s_hi = s;
            ghi = gs;
        }
        double next = s - gs / dg;
        const bool bracketed = (glo > 0) != (ghi > 0);
        if (!(next > s_lo && next < s_hi)) next = bracketed ? 0.5 * (s_lo + s_hi) : std::clamp(next, s_lo, s_hi);
        if (std::abs(next - s) < 1e-15 * std::max(1.0, s)) return next;
        s = next;
    }
    return s;
}

Projection CurveLocator::project(const Vec2& p) const {
    const std::size_t n = pts_.size();
    std::size_t best = 0;
    double best_d2 = (p - pts_[0]).squaredNorm();
    auto consider = [&](std::size_t k) {
        const double d2 = (p - pts_[k]).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    };
    if (monotone_) {
        // Any point with | |q| - |p| | > best distance cannot be nearer.
        const double rp = p.norm();
        const std::size_t mid = static_cast<std::size_t>(
            std::lower_bound(radius_.begin(), radius_.end(), rp) - radius_.begin());
        const std::size_t start = std::min(mid, n - 1);
        consider(start);
        for (std::size_t k = start + 1; k < n; ++k) {
            const double gap = radius_[k] - rp;
            if (gap > 0 && gap * gap > best_d2) break;
            consider(k);
        }
        for (std::size_t k = start; k-- > 0;) {
            const double gap = rp - radius_[k];
            if (gap > 0 && gap * gap > best_d2) break;
            consider(k);
        }
    } else {
        for (std::size_t k = 1; k < n; ++k) consider(k);
    }

    const double s_lo = s_[best == 0 ? 0 : best - 1];
    const double s_hi = s_[std::min(best + 1, n - 1)];
    double foot = refine(p, s_lo, s_[best], s_hi);
    // The axis endpoint is a critical point by symmetry; keep whichever is nearer.
    if (best <= 1 && (p - curve_->point(0.0)).squaredNorm() < (p - curve_->point(foot)).squaredNorm())
        foot = 0.0;

    const CurveState st = curve_->at(foot);
    const Vec2 d = p - st.point();
    const Vec2 T(std::cos(st.theta), std::sin(st.theta));
    Projection out;
    out.foot = foot;
    out.t = d.dot(curve_->orientation() * Vec2(-T.y(), T.x()));
    out.perpendicularity = std::abs(d.dot(T));
    out.at_far_end = foot >= curve_->length() - 1e-12;
    if (out.at_far_end) out.t = std::copysign(d.norm(), out.t);
    return out;
}

}  // namespace aclab
