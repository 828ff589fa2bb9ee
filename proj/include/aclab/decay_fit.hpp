#pragma once

#include <span>
#include <utility>
#include <vector>

namespace aclab {

struct DecayFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    /// Root-mean-square residual of the line fit in log-log space.
    double fit_residual = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit value ~ amplitude * r^exponent over r in [r_min, r_max].
/// Throws InvalidArgument with fewer than 10 points in the window or a
/// nonpositive value inside it.
DecayFit fit_decay_exponent(std::span<const double> r, std::span<const double> value, double r_min,
                            double r_max);

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series, double r_min,
                            double r_max);

}  // namespace aclab
