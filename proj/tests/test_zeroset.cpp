#include "aclab/error.hpp"
#include "aclab/fermi.hpp"
#include "aclab/minsurf.hpp"
#include "aclab/zeroset.hpp"

#include <doctest.h>

#include <cmath>

using namespace aclab;

namespace {

ScalarField2D fill(const Grid2D& g, auto f) {
    ScalarField2D out(g);
    for (std::size_t j = 0; j < g.side(); ++j)
        for (std::size_t i = 0; i < g.side(); ++i) out(i, j) = f(g.coord(i), g.coord(j));
    return out;
}

}  // namespace

TEST_CASE("zeroset: straight line") {
    const Grid2D g({3, 3}, 2.0, 0.125);
    const ZeroSet z = zero_set_extract(fill(g, [](double a, double b) { return a - 0.5 * b - 0.3; }));
    REQUIRE(z.components.size() == 1);
    CHECK(z.vertex_count() > 10);
    for (const Vec2& p : z.components[0]) CHECK(std::abs(p.x() - 0.5 * p.y() - 0.3) < 1e-12);
}

TEST_CASE("zeroset: circle") {
    const Grid2D g({3, 3}, 4.0, 1.0 / 32.0);
    const ZeroSet z = zero_set_extract(fill(g, [](double a, double b) { return std::hypot(a, b) - 3.0; }));
    REQUIRE(z.components.size() == 1);
    const Polyline& c = z.components[0];
    for (const Vec2& p : c) CHECK(std::abs(p.norm() - 3.0) < 1e-3);
    // Ordered: consecutive vertices are within one cell diagonal.
    for (std::size_t i = 1; i < c.size(); ++i) CHECK((c[i] - c[i - 1]).norm() <= std::sqrt(2.0) / 32.0 + 1e-12);
    // Runs from one axis to the other.
    const Vec2 a = c.front(), b = c.back();
    CHECK(std::min(std::abs(a.x()), std::abs(a.y())) < 1e-12);
    CHECK(std::min(std::abs(b.x()), std::abs(b.y())) < 1e-12);
}

TEST_CASE("zeroset: two components") {
    const Grid2D g({3, 3}, 4.0, 1.0 / 16.0);
    const ZeroSet z = zero_set_extract(
        fill(g, [](double a, double b) { return (std::hypot(a, b) - 1.0) * (std::hypot(a, b) - 3.0); }));
    CHECK(z.components.size() == 2);
}

TEST_CASE("zeroset: no sign change") {
    const Grid2D g({3, 3}, 1.0, 0.125);
    CHECK_THROWS_AS(zero_set_extract(ScalarField2D(g, 1.0)), DomainError);
    CHECK_THROWS_AS(zero_set_extract(ScalarField2D(g, -0.5)), DomainError);
}

TEST_CASE("zeroset: deviation of the approximate solution") {
    const GeneratingCurve curve = shoot_hardt_simon({3, 3});
    const Grid2D g({3, 3}, 8.0, 1.0 / 32.0);
    const TubularMap map(curve);
    const ScalarField2D approx = build_approx_solution(g, tube_coordinates(g, map), {});
    const ZeroSetDeviation dev = zero_set_deviation(zero_set_extract(approx), map, 7.0);
    // u~ vanishes exactly on Gamma; only the bilinear reconstruction moves the zero set.
    CHECK(dev.max_dev < 1e-3);
    CHECK(!dev.series.empty());
    CHECK(!dev.envelope.empty());
    CHECK(dev.envelope.front().first == doctest::Approx(1.5));
    for (const auto& [d, t] : dev.series)
        if (d <= 7.0) CHECK(std::abs(t) <= dev.max_dev);
}
