#include "aclab/grid.hpp"

#include "aclab/error.hpp"

#include <algorithm>
#include <cmath>

namespace aclab {

namespace {

// Integral of s^p over [a, b].
double power_integral(double a, double b, int p) {
    return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

}  // namespace

Grid2D::Grid2D(LinkSpec spec, double R, double h) : spec_(spec), R_(R), h_(h) {
    spec_.validate();
    if (!(h > 0.0) || !(R > 0.0)) throw InvalidArgument("Grid2D: R and h must be positive");
    const double ratio = R / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio || rounded < 2)
        throw InvalidArgument("Grid2D: R / h must be an integer >= 2");
    N_ = static_cast<std::size_t>(rounded);
    vol1_.resize(side());
    vol2_.resize(side());
    face1_.resize(N_);
    face2_.resize(N_);
    for (std::size_t i = 0; i <= N_; ++i) {
        const double lo = std::max(0.0, coord(i) - 0.5 * h_);
        const double hi = std::min(R_, coord(i) + 0.5 * h_);
        vol1_[i] = power_integral(lo, hi, spec_.n1);
        vol2_[i] = power_integral(lo, hi, spec_.n2);
    }
    for (std::size_t i = 0; i < N_; ++i) {
        const double mid = coord(i) + 0.5 * h_;
        face1_[i] = std::pow(mid, spec_.n1);
        face2_[i] = std::pow(mid, spec_.n2);
    }
}

void Grid2D::check_resolution(double eps) const {
    if (h_ > eps / 8.0 * (1.0 + 1e-12))
        throw InvalidArgument("Grid2D: spacing exceeds eps / 8");
}

ScalarField2D::ScalarField2D(Grid2D grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

double ScalarField2D::interpolate(double s1, double s2) const {
    const double h = grid_.spacing();
    const double N = static_cast<double>(grid_.cells());
    const double a = std::clamp(s1 / h, 0.0, N);
    const double b = std::clamp(s2 / h, 0.0, N);
    const std::size_t i = std::min(static_cast<std::size_t>(a), grid_.cells() - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(b), grid_.cells() - 1);
    const double fa = a - static_cast<double>(i), fb = b - static_cast<double>(j);
    const auto& v = *this;
    return (1 - fa) * (1 - fb) * v(i, j) + fa * (1 - fb) * v(i + 1, j) + (1 - fa) * fb * v(i, j + 1) +
           fa * fb * v(i + 1, j + 1);
}

double ScalarField2D::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField2D::finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace aclab
