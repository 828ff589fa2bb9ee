#pragma once

#include <span>
#include <vector>

namespace aclab {

/// Pointwise data of the heteroclinic u1(t) = tanh(t / sqrt(2)).
struct ProfileSample {
    double u;
    double du;
    double ddu;
    /// First integral 2 u'^2 - (1 - u^2)^2, identically zero on u1.
    double energy;
};

/// Closed-form evaluator of the 1D interface profile and of its scaled
/// family u_eps(t) = u1(t / eps).
///
/// Derivatives follow the scaled-family convention: `dot(t)` is u1'(t / eps),
/// not d/dt u1(t / eps); the latter is dot(t) / eps.
class HeteroclinicProfile {
public:
    explicit HeteroclinicProfile(double eps = 1.0);

    double eps() const noexcept { return eps_; }

    double value(double t) const;
    double dot(double t) const;
    double ddot(double t) const;

    /// Distance of value(t) from its limit sign(t), computed without
    /// cancellation: 1 - |u1(t / eps)|.
    double defect(double t) const;

private:
    double eps_;
};

ProfileSample evaluate_profile(double t);

/// c = int (u1')^2 and m2k[k-1] = int t^{2k} (u1')^2 for k = 1..K.
struct ProfileMoments {
    double c = 0.0;
    std::vector<double> m2k;
};

ProfileMoments profile_moments(int K);

/// Lowest part of the spectrum of L0 = -(d^2/dt^2 + 1 - 3 u1^2).
struct L0Spectrum {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double spectrum_edge = 2.0;
    /// max_t |L0 w0| for w0 = sech^2(t / sqrt 2), evaluated in closed form.
    double w0_identity_residual = 0.0;
    /// max_t |L0 w1 - 1.5 w1| for w1 = sinh / cosh^2.
    double w1_identity_residual = 0.0;
};

/// Discretizes L0 on [-L, L] (zero boundary values, central differences)
/// and extracts its two lowest eigenvalues by shifted inverse iteration.
/// Throws InvalidArgument when spacing > 0.05 or halfwidth < 15.
L0Spectrum l0_eigencheck(double grid_halfwidth, double spacing);

/// Uniform interior grid of [-L, L] used by the discrete L0 helpers.
struct L0Grid {
    double halfwidth;
    double spacing;

    std::size_t size() const;
    double node(std::size_t i) const;
};

/// Discrete quadratic form sum (w_{i+1} - w_i)^2 / h + h sum (3 u1^2 - 1) w_i^2
/// with zero values outside the grid.
double l0_quadratic_form(const L0Grid& grid, std::span<const double> w);

/// Removes from w its discrete L2 component along u1'.
void project_out_translation(const L0Grid& grid, std::span<double> w);

}  // namespace aclab
