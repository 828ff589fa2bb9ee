#pragma once

#include "aclab/cone.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <vector>

namespace aclab {

using Vec2 = Eigen::Vector2d;

/// State of the generating curve at one arclength value.
struct CurveState {
    double s = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 point() const { return {x, y}; }
    Vec2 tangent() const;
};

/// Arclength-sampled profile curve s -> (x(s), y(s)) of an
/// O(n1+1) x O(n2+1)-invariant hypersurface (x(s) z1, y(s) z2).
///
/// Samples sit on a uniform arclength grid s_i = i * spacing starting at the
/// axis point s = 0. Between samples the curve is reconstructed by quintic
/// Hermite interpolation using the analytic first and second derivatives of
/// the minimal-surface system, so `at(s)` is consistent with the ODE to
/// interpolation accuracy O(spacing^6).
///
/// The unit normal is N = orientation * (-sin theta, cos theta).
class GeneratingCurve {
public:
    GeneratingCurve() = default;
    GeneratingCurve(LinkSpec spec, double spacing, std::vector<double> x, std::vector<double> y,
                    std::vector<double> theta, int orientation = 1);

    const LinkSpec& spec() const noexcept { return spec_; }
    double spacing() const noexcept { return spacing_; }
    int orientation() const noexcept { return orientation_; }
    std::size_t size() const noexcept { return x_.size(); }
    double length() const noexcept { return spacing_ * static_cast<double>(size() - 1); }

    double s(std::size_t i) const noexcept { return spacing_ * static_cast<double>(i); }
    double x(std::size_t i) const noexcept { return x_[i]; }
    double y(std::size_t i) const noexcept { return y_[i]; }
    double theta(std::size_t i) const noexcept { return theta_[i]; }
    CurveState sample(std::size_t i) const { return {s(i), x_[i], y_[i], theta_[i]}; }

    /// theta' from the minimal-surface equation (its axis limit at s = 0).
    double theta_prime(std::size_t i) const;

    /// Interpolated state at arbitrary s in [0, length()].
    CurveState at(double s) const;
    /// theta'(s) evaluated from the interpolated state.
    double theta_prime_at(double s) const;

    Vec2 point(double s) const { return at(s).point(); }
    Vec2 tangent(double s) const { return at(s).tangent(); }
    Vec2 normal(double s) const;

    /// sqrt(1 + s^2): the weight function measured from the axis point.
    static double d_gamma(double s) { return std::sqrt(1.0 + s * s); }

    /// Dilated copy factor * Gamma (arclength and coordinates scale, theta does not).
    GeneratingCurve scaled(double factor) const;

    /// Dilation Jacobi field zeta0 = position . N at sample i.
    double zeta0(std::size_t i) const;
    double zeta0_at(double s) const;

private:
    double theta_second(std::size_t i) const;

    LinkSpec spec_;
    double spacing_ = 0.0;
    std::vector<double> x_, y_, theta_;
    int orientation_ = 1;
};

/// Right-hand side of the Cartesian arclength system
/// x' = cos theta, y' = sin theta, theta' = n2 cos theta / y - n1 sin theta / x.
/// Throws DomainError for x <= 0 or y <= 0.
std::array<double, 3> cartesian_rhs(const LinkSpec& spec, double x, double y, double theta);

/// Nearest-point projection onto a generating curve in the (|x|, |y|) quadrant.
struct Projection {
    /// Arclength of the nearest curve point.
    double foot = 0.0;
    /// Signed distance, positive on the side the normal points to.
    double t = 0.0;
    /// |(p - c(foot)) . T(foot)|, zero at an interior critical point.
    double perpendicularity = 0.0;
    /// The nearest point is the far end of the sampled curve.
    bool at_far_end = false;
};

/// Answers nearest-point queries against one curve. When |c(s)| is strictly
/// increasing (true for one-sided Hardt-Simon leaves) candidates are pruned
/// by radius; otherwise a full scan of the coarse samples is made.
class CurveLocator {
public:
    explicit CurveLocator(const GeneratingCurve& curve, double coarse_spacing = 0.05);

    Projection project(const Vec2& p) const;
    const GeneratingCurve& curve() const noexcept { return *curve_; }
    bool radially_monotone() const noexcept { return monotone_; }

private:
    double refine(const Vec2& p, double s_lo, double s_guess, double s_hi) const;

    const GeneratingCurve* curve_;
    std::vector<double> s_;
    std::vector<Vec2> pts_;
    std::vector<double> radius_;
    bool monotone_ = false;
};

}  // namespace aclab
