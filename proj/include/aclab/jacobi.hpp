#pragma once

#include "aclab/curve.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aclab {

/// Discrete J = w^{-1} (w zeta')' + |A|^2 zeta on the sampled curve, with
/// w = x^{n1} y^{n2}. Interior nodes use a conservative three-point scheme
/// whose cell volumes integrate w exactly to quadrature accuracy, which makes
/// -V J symmetric. The axis node uses the half cell (the symmetric condition);
/// the last node falls back to one-sided differences and is flagged.
struct JacobiApplication {
    std::vector<double> values;
    std::vector<bool> one_sided;
};

JacobiApplication jacobi_apply(const GeneratingCurve& curve, std::span<const double> zeta);
JacobiApplication jacobi_apply(const GeneratingCurve& curve,
                               const std::function<double(double)>& zeta);

/// max |J zeta| / max (|zeta| / d_gamma^2) over nodes with centred stencils.
double jacobi_scaled_residual(const GeneratingCurve& curve, std::span<const double> zeta,
                              const JacobiApplication& jz);

/// Boundary data for jacobi_solve. Without an inner value the axis node takes
/// the symmetric (natural) condition; the outer value is always imposed.
struct JacobiBoundary {
    std::optional<double> inner;
    double outer = 0.0;
};

struct JacobiSolution {
    std::vector<double> zeta;
    /// max |J zeta - f| over the rows that were solved for.
    double residual = 0.0;
};

/// Solves J zeta = f by symmetric tridiagonal elimination. Throws
/// SingularSystemError when a pivot collapses.
JacobiSolution jacobi_solve(const GeneratingCurve& curve, std::span<const double> f,
                            const JacobiBoundary& boundary = {});

/// Dilation field zeta0 = position . N at every sample.
std::vector<double> dilation_field(const GeneratingCurve& curve);

}  // namespace aclab
