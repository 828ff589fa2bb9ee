#pragma once

#include "aclab/cone.hpp"
#include "aclab/curve.hpp"

#include <array>
#include <string>
#include <vector>

namespace aclab {

/// Right-hand side of the (u, v) system in its published form, where u is
/// the polar angle of the curve point and v the tangent angle:
///   u' = cos u sin u sin(u - v),  v' = n1 sin u sin v - n2 cos u cos v.
std::array<double, 2> uv_rhs(const LinkSpec& spec, double u, double v);

/// Both formulations evaluated at one Cartesian state.
struct EquivariantRhs {
    std::array<double, 3> cartesian;
    std::array<double, 2> uv;
    /// The published flow is the arclength flow of (atan2(y, x), theta)
    /// under d(sigma) = -ds / (r sin u cos u). This is the sup-norm gap
    /// between `uv` and that rescaled arclength derivative.
    double uv_consistency = 0.0;
};

EquivariantRhs equivariant_rhs(const LinkSpec& spec, double x, double y, double theta);

struct ShootOptions {
    double s_max = 200.0;
    /// Absolute and relative step tolerance of the integrator.
    double tol = 1e-10;
    /// Arclength spacing of the stored samples.
    double spacing = 0.01;
    /// Arclength at which the axis series hands over to the integrator.
    double s_start = 1e-6;
};

/// Shoots the generating curve from (x, y, theta) = (1, 0, pi/2).
/// Throws CrossingError if the curve meets the cone or returns to the axis.
GeneratingCurve shoot_hardt_simon(const LinkSpec& spec, const ShootOptions& opts = {});

/// Signed distance from (x, y) to the cone ray at angle cone_angle(spec),
/// positive on the side of the x axis.
double distance_to_cone(const LinkSpec& spec, double x, double y);

/// Principal curvatures of the hypersurface generated by one curve point,
/// measured against the unit normal N = orientation (-sin theta, cos theta).
struct PrincipalCurvatures {
    double profile = 0.0;
    double type1 = 0.0;
    double type2 = 0.0;
    int n1 = 1;
    int n2 = 1;

    /// sum kappa_i^k with multiplicities.
    double trace_power(int k) const;
    double mean() const { return trace_power(1); }
    double norm2() const { return trace_power(2); }
    double max_abs() const;
};

PrincipalCurvatures principal_curvatures(const LinkSpec& spec, double x, double y, double theta,
                                         double theta_prime, int orientation = 1);
PrincipalCurvatures principal_curvatures(const GeneratingCurve& curve, double s);

struct CurveGeometry {
    std::vector<double> kappa_profile;
    std::vector<double> kappa_type1;
    std::vector<double> kappa_type2;
    std::vector<double> normA2;
    std::vector<double> d_gamma;
    /// theta' from a sixth-order difference of the samples plus the sphere
    /// terms; NaN where the stencil does not fit (last three samples).
    std::vector<double> minimality_residual;
    double max_minimality_residual = 0.0;
    double max_speed_defect = 0.0;
};

CurveGeometry curve_geometry(const GeneratingCurve& curve);

struct FoliationPair {
    double scale_a = 0.0;
    double scale_b = 0.0;
    double min_distance = 0.0;
    bool disjoint = false;
};

struct FoliationReport {
    std::vector<FoliationPair> pairs;
    /// Polar angle atan2(y, x) strictly increasing along the curve, so every
    /// ray from the origin meets it at most once.
    bool polar_angle_monotone = false;
    double min_polar_angle_step = 0.0;
    bool ok() const;
};

/// Pairwise distance between dilated copies of the curve (on the part where
/// both are sampled) and the ray test.
FoliationReport foliation_check(const GeneratingCurve& curve, const std::vector<double>& scales);

/// Number of sign changes of the ray at polar angle phi against the curve polyline.
int ray_crossings(const GeneratingCurve& curve, double phi);

}  // namespace aclab
