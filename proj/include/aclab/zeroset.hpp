#pragma once

#include "aclab/fermi.hpp"
#include "aclab/grid.hpp"

#include <limits>
#include <vector>

namespace aclab {

using Polyline = std::vector<Vec2>;

/// Zero level set as ordered polylines, one per connected component.
struct ZeroSet {
    std::vector<Polyline> components;
    std::size_t vertex_count() const;
};

/// Marching squares with linear interpolation along cell edges. Saddle cells
/// are resolved with the cell-centre average. Throws DomainError when the
/// field does not change sign.
ZeroSet zero_set_extract(const ScalarField2D& u);

struct ZeroSetDeviation {
    /// max |t| over vertices with d_gamma(foot) <= d_max.
    double max_dev = 0.0;
    /// (d_gamma(foot), t) per vertex, in polyline order.
    std::vector<std::pair<double, double>> series;
    /// Upper envelope of |t| over unit-width bins in d_gamma, starting at 1.
    std::vector<std::pair<double, double>> envelope;
};

ZeroSetDeviation zero_set_deviation(const ZeroSet& zero, const TubularMap& map,
                                    double d_max = std::numeric_limits<double>::infinity());

}  // namespace aclab
