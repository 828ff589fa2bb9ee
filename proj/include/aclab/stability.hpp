#pragma once

#include "aclab/acpde.hpp"
#include "aclab/fermi.hpp"

#include <cstdint>
#include <vector>

namespace aclab {

struct SpectrumOptions {
    int k = 4;
    /// Shift of the shift-and-invert iteration; must lie below the spectrum bottom.
    double shift = -0.01;
    int maxit = 300;
    double tol = 1e-9;
    std::uint64_t seed = 42;
};

/// Lowest eigenpairs of L = -(eps^2 Delta_red + 1 - 3u^2) in the
/// volume-weighted inner product, Dirichlet outer boundary, symmetric axes.
struct SpectrumReport {
    std::vector<double> eigenvalues;
    std::vector<ScalarField2D> eigenfields;
    /// max_i ||L x_i - lambda_i x_i||_V for the returned pairs.
    std::vector<double> residuals;
    double orthonormality_defect = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Blocked shift-and-invert subspace iteration with Rayleigh-Ritz.
/// Throws InvalidArgument when u is not a solution (sup residual > 1e-8)
/// and ConvergenceError after maxit sweeps.
SpectrumReport linearization_spectrum(const ScalarField2D& u, double eps,
                                      const SpectrumOptions& opts = {});

struct DilationOptions {
    double eps = 0.25;
    double lambda_step = 1e-3;
    double delta_star = 0.5;
    double c_star = 0.2;
    NewtonOptions newton;
};

/// phi = d/d(lambda) of the solution family whose zero set follows
/// (1 + lambda) Gamma.
///
/// `phi` solves the linearized equation with the boundary data
/// u1'(t / eps) (-zeta0) / eps, the exact lambda-derivative of the Dirichlet
/// values; `phi_fd` is the central difference of two Newton solves at
/// lambda = +-lambda_step.
struct PhiReport {
    ScalarField2D phi;
    ScalarField2D phi_fd;
    bool positive = false;
    double min_interior = 0.0;
    /// sup |(eps^2 Delta_red + 1 - 3u^2) phi| / sup |phi| over interior nodes.
    double kernel_residual = 0.0;
    double fd_kernel_residual = 0.0;
    /// sup |phi_fd - phi| / sup |phi|.
    double fd_agreement = 0.0;
    /// Relative sup gap to u1'(t / eps) (-zeta0) / eps on nodes with |t| <= 2 eps and d_gamma <= 10.
    double tube_agreement = 0.0;
    std::size_t negative_pivots = 0;
    NewtonReport plus;
    NewtonReport minus;
};

/// Throws InvalidArgument when the two shifted solves have zero sets with a
/// different number of components.
PhiReport phi_from_dilation(const GeneratingCurve& curve, const ScalarField2D& u,
                            const DilationOptions& opts);

struct QuadraticTrial {
    double q = 0.0;
    double norm2 = 0.0;
    /// sum over edges eps^2 c_e phi_i phi_j (psi_i / phi_i - psi_j / phi_j)^2.
    double rearranged = 0.0;
    double gap = 0.0;
};

/// Random test functions: sums of up to five bumps (1 - r^2 / w^2)^3 with
/// widths in [2 eps, 10 eps], centred within 4 eps of Gamma at arclength up
/// to R / 2, supports kept off the axes and the outer boundary.
std::vector<ScalarField2D> random_test_functions(const GeneratingCurve& curve, const Grid2D& grid,
                                                 double eps, int trials, std::uint64_t seed);

/// Discrete form Q(psi) = psi^T K psi with K = -V(eps^2 Delta_red + 1 - 3u^2)
/// and its ground-state rearrangement with respect to phi.
QuadraticTrial quadratic_form(const AssembledOperator& op, const ScalarField2D& phi,
                              const ScalarField2D& psi);

std::vector<QuadraticTrial> quadratic_form_check(const ScalarField2D& u, double eps,
                                                 const ScalarField2D& phi,
                                                 const std::vector<ScalarField2D>& psis);

}  // namespace aclab
