#pragma once

#include "aclab/curve.hpp"
#include "aclab/grid.hpp"
#include "aclab/minsurf.hpp"
#include "aclab/profile1d.hpp"

#include <functional>
#include <span>
#include <vector>

namespace aclab {

/// Fermi coordinates (foot, t) around a generating curve. The sign of t
/// follows the curve normal, which points toward the cone.
struct TubePoint {
    double foot = 0.0;
    double t = 0.0;
    /// |t| <= c_star * d_gamma(foot).
    bool valid = false;
    double perpendicularity = 0.0;
};

class TubularMap {
public:
    explicit TubularMap(const GeneratingCurve& curve, double c_star = 0.2);

    TubePoint locate(const Vec2& p) const;
    Vec2 point(double foot, double t) const;

    const GeneratingCurve& curve() const noexcept { return *curve_; }
    double c_star() const noexcept { return c_star_; }

private:
    const GeneratingCurve* curve_;
    CurveLocator locator_;
    double c_star_;
};

TubePoint signed_distance(const Vec2& p, const TubularMap& map);

/// Fermi coordinates of every node of a grid.
struct TubeCoordinates {
    std::vector<double> foot;
    std::vector<double> t;
    std::vector<double> d_gamma;
    std::vector<bool> valid;
};

TubeCoordinates tube_coordinates(const Grid2D& grid, const TubularMap& map);

struct ParallelMeanCurvature {
    double exact = 0.0;
    double series = 0.0;
};

/// Mean curvature of the parallel hypersurface at signed distance z,
/// sum kappa_i / (1 - z kappa_i), and its power series
/// sum_{j=1}^{order} Tr h^{(j+1)} z^j (the j = 0 term is the mean curvature,
/// zero on a minimal surface, and is dropped). Throws DomainError when
/// max |z kappa_i| >= 1.
ParallelMeanCurvature parallel_mean_curvature(const PrincipalCurvatures& k, double z,
                                              int order = 12);
ParallelMeanCurvature parallel_mean_curvature(const GeneratingCurve& curve, double s, double z,
                                              int order = 12);

/// Upper bound for the series remainder: sum_i |kappa_i| q^{order+1} / (1 - q),
/// q = max |z kappa_i|.
double series_tail_bound(const PrincipalCurvatures& k, double z, int order = 12);

/// C^2 step 6x^5 - 15x^4 + 10x^3 on [0, 1], clamped outside.
double smoothstep(double x);

struct CutoffParams {
    double eps = 0.25;
    double delta_star = 0.5;
};

/// chi_j(foot, t): 1 for |t| <= eps^delta (d_gamma - (2j-1)/100),
/// 0 for |t| >= eps^delta (d_gamma - (2j-2)/100).
double cutoff_chi(int j, double foot, double t, const CutoffParams& p);
/// Derivative of cutoff_chi with respect to t.
double cutoff_chi_dt(int j, double foot, double t, const CutoffParams& p);

struct ApproxOptions {
    double eps = 0.25;
    double delta_star = 0.5;
    /// Value grafted on the side the normal points to (the cone side).
    int plus_side = 1;
};

/// u~ = chi_1 u_eps(t) + (1 - chi_1) (+-1), evaluated node by node.
ScalarField2D build_approx_solution(const Grid2D& grid, const TubeCoordinates& tube,
                                    const ApproxOptions& opts);

/// -eps H_t u1'(t / eps) with the closed-form H_t at the foot point.
double inner_residual(const GeneratingCurve& curve, double s, double t, double eps);
/// Sup over |t| <= c_star d_gamma(s) of |inner_residual|, sampled every eps / 50.
double inner_residual_sup(const GeneratingCurve& curve, double s, double eps, double c_star = 0.2);

struct PiValue {
    double value = 0.0;
    /// The window |t| <= 2 c_star d_gamma is shorter than 10 eps, so the
    /// profile tail is cut and Pi(u_dot) falls short of 1.
    bool truncated = false;
};

/// Pi(f)(s) = (1 / (eps c)) int f(s, t) u_dot(t) chi(t) dt with chi = 1 on
/// |t| <= c_star d_gamma and 0 beyond twice that. The integrand is folded
/// onto t > 0 before the Gauss-Legendre panels (width eps / 2) are applied,
/// so odd parts cancel exactly.
PiValue project_pi(const std::function<double(double)>& f_of_t, double d_gamma, double eps,
                   double c_star = 0.2);
PiValue project_pi(const GeneratingCurve& curve, const std::function<double(double, double)>& f,
                   double s, double eps, double c_star = 0.2);

/// Pi of the inner residual along the curve.
PiValue projected_inner_residual(const GeneratingCurve& curve, double s, double eps,
                                 double c_star = 0.2);

/// f - Pi(f) u_dot at one (s, t).
double project_pi_perp(const GeneratingCurve& curve, const std::function<double(double, double)>& f,
                       double s, double t, double eps, double c_star = 0.2);

enum class Direction { forward, inverse };

/// Pulls a field back through D_zeta(foot, t) = Z(foot, t - chi_2 zeta(foot))
/// (forward) or through its inverse (per-point monotone root finding). Nodes
/// outside the chi_2 support are copied. Throws DomainError when
/// sup |zeta| sup |d chi_2 / dt| >= 1.
ScalarField2D apply_dzeta(const ScalarField2D& field, const TubularMap& map,
                          const TubeCoordinates& tube, const std::function<double(double)>& zeta,
                          const CutoffParams& cutoff, Direction direction);

/// sup over samples of d_gamma^{-nu} times the sup of |w| over the arclength
/// ball of the given radius (0 means pointwise).
double weighted_norm_curve(const GeneratingCurve& curve, std::span<const double> w, double nu,
                           double ball_radius = 1.0);

/// Same on grid nodes inside the tube, weight d_gamma(foot)^{-nu}, balls of radius eps.
double weighted_norm_tube(const ScalarField2D& w, const TubeCoordinates& tube, double nu,
                          double ball_radius);

/// (1 + |p|^2)^{-nu/2} weight over every grid node, balls of radius eps.
double weighted_norm_ambient(const ScalarField2D& w, double nu, double ball_radius);

}  // namespace aclab
