#pragma once

#include "aclab/cone.hpp"

#include <cstddef>
#include <vector>

namespace aclab {

/// Tensor grid on the reduced quadrant [0, R]^2 with coordinates
/// (s1, s2) = (|x|, |y|), x in R^{n1+1}, y in R^{n2+1}.
///
/// Each node owns the cell [s - h/2, s + h/2] clipped to [0, R] in both
/// directions. Cell volumes and face weights integrate the orbit density
/// s1^{n1} s2^{n2} exactly, so operators built from them are conservative
/// and symmetric in the volume-weighted inner product.
class Grid2D {
public:
    Grid2D() = default;
    /// Throws InvalidArgument unless h > 0 and R / h is an integer.
    Grid2D(LinkSpec spec, double R, double h);

    const LinkSpec& spec() const noexcept { return spec_; }
    double radius() const noexcept { return R_; }
    double spacing() const noexcept { return h_; }
    /// Number of intervals per side; nodes run 0..cells().
    std::size_t cells() const noexcept { return N_; }
    std::size_t side() const noexcept { return N_ + 1; }
    std::size_t size() const noexcept { return side() * side(); }

    double coord(std::size_t i) const noexcept { return h_ * static_cast<double>(i); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * side() + i; }
    bool outer(std::size_t i, std::size_t j) const noexcept { return i == N_ || j == N_; }

    /// Integral of s1^{n1} over the cell of node i (and s2^{n2} for j).
    double volume1(std::size_t i) const { return vol1_[i]; }
    double volume2(std::size_t j) const { return vol2_[j]; }
    double cell_volume(std::size_t i, std::size_t j) const { return vol1_[i] * vol2_[j]; }
    /// s^{n1} at the face between nodes i and i + 1 (and s^{n2} for the second axis).
    double face1(std::size_t i) const { return face1_[i]; }
    double face2(std::size_t j) const { return face2_[j]; }

    /// Throws InvalidArgument when h > eps / 8.
    void check_resolution(double eps) const;

private:
    LinkSpec spec_;
    double R_ = 0.0;
    double h_ = 0.0;
    std::size_t N_ = 0;
    std::vector<double> vol1_, vol2_, face1_, face2_;
};

/// One value per grid node, row-major in s2.
class ScalarField2D {
public:
    ScalarField2D() = default;
    explicit ScalarField2D(Grid2D grid, double fill = 0.0);

    const Grid2D& grid() const noexcept { return grid_; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

    /// Bilinear interpolation, clamped to the grid.
    double interpolate(double s1, double s2) const;
    double sup_norm() const;
    bool finite() const;

private:
    Grid2D grid_;
    std::vector<double> values_;
};

}  // namespace aclab
