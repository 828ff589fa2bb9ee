#include "aclab/decay_fit.hpp"
#include "aclab/error.hpp"
#include "aclab/fermi.hpp"
#include "aclab/zeroset.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace aclab;

namespace {

const GeneratingCurve& leaf() {
    static const GeneratingCurve c = shoot_hardt_simon({3, 3});
    return c;
}

struct TubeFixture {
    Grid2D grid{LinkSpec{3, 3}, 8.0, 1.0 / 32.0};
    TubularMap map{leaf()};
    TubeCoordinates tube = tube_coordinates(grid, map);
};

const TubeFixture& fixture() {
    static const TubeFixture f;
    return f;
}

}  // namespace

TEST_CASE("fermi: points on and beside the curve") {
    const TubularMap map(leaf());
    for (double s : {0.0, 0.7, 2.0, 9.3, 40.0}) {
        const TubePoint on = map.locate(leaf().point(s));
        CHECK(std::abs(on.t) < 1e-10);
        CHECK(on.foot == doctest::Approx(s).epsilon(1e-10));
        for (double tau : {-0.05, 0.02, 0.1}) {
            const TubePoint off = signed_distance(leaf().point(s) + tau * leaf().normal(s), map);
            CHECK(off.t == doctest::Approx(tau).epsilon(1e-10));
            CHECK(std::abs(off.foot - s) < 1e-10);
            CHECK(off.perpendicularity < 1e-10);
            CHECK(off.valid);
        }
    }
}

TEST_CASE("fermi: sign of t is constant on the cone side") {
    const TubularMap map(leaf());
    for (double phi : {std::numbers::pi / 4, 0.9, 1.3})
        for (double r = 0.5; r <= 100.0; r += 0.5)
            CHECK(signed_distance({r * std::cos(phi), r * std::sin(phi)}, map).t > 0.0);
    for (double r = 1.5; r <= 10.0; r += 0.5) CHECK(signed_distance({r, 0.05}, map).t < 0.0);
}

TEST_CASE("fermi: tube map round trip") {
    const TubularMap map(leaf());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double s = 60.0 * uni(rng);
        const double t = (2.0 * uni(rng) - 1.0) * 0.2 * GeneratingCurve::d_gamma(s);
        const Vec2 p = map.point(s, t);
        const TubePoint back = map.locate(p);
        CHECK((map.point(back.foot, back.t) - p).norm() < 1e-8);
        CHECK(std::abs(back.t - t) < 1e-8);
        CHECK(std::abs(back.foot - s) < 1e-8);
    }
}

TEST_CASE("fermi: grid tube coordinates are perpendicular feet") {
    const TubeFixture& f = fixture();
    double worst = 0.0;
    for (std::size_t k = 0; k < f.grid.size(); k += 97) {
        const std::size_t i = k % f.grid.side(), j = k / f.grid.side();
        const Vec2 p{f.grid.coord(i), f.grid.coord(j)};
        if (!f.tube.valid[k]) continue;
        worst = std::max(worst, (f.map.point(f.tube.foot[k], f.tube.t[k]) - p).norm());
        CHECK(f.tube.d_gamma[k] == doctest::Approx(GeneratingCurve::d_gamma(f.tube.foot[k])));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("fermi: parallel mean curvature, sphere and cone models") {
    const PrincipalCurvatures sphere{1.0, 1.0, 1.0, 3, 3};
    for (double z : {-0.4, 0.1, 0.3}) {
        const ParallelMeanCurvature h = parallel_mean_curvature(sphere, z, 12);
        CHECK(h.exact == doctest::Approx(7.0 / (1.0 - z)).epsilon(1e-14));
    }
    const double r = 5.0;
    const PrincipalCurvatures cone{0.0, 1.0 / r, -1.0 / r, 4, 4};
    for (double z : {-2.0, -0.3, 0.5, 1.9}) {
        const ParallelMeanCurvature h = parallel_mean_curvature(cone, z, 12);
        CHECK(h.exact == doctest::Approx(8.0 * z / (r * r - z * z)).epsilon(1e-13));
        CHECK(parallel_mean_curvature(cone, -z, 12).exact == -h.exact);
    }
    CHECK_THROWS_AS(parallel_mean_curvature(cone, r, 12), DomainError);
    CHECK_THROWS_AS(parallel_mean_curvature(cone, -1.2 * r, 12), DomainError);
}

TEST_CASE("fermi: series truncation is inside its geometric tail bound") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double s = 100.0 * uni(rng);
        const PrincipalCurvatures k = principal_curvatures(leaf(), s);
        const double z = (2.0 * uni(rng) - 1.0) * 0.5 / k.max_abs();
        const ParallelMeanCurvature h = parallel_mean_curvature(k, z, 12);
        CHECK(std::abs(h.exact - h.series) <= series_tail_bound(k, z, 12) + 1e-15 + std::abs(k.mean()));
    }
}

TEST_CASE("fermi: series agrees to 1e-10 once |z kappa| is small") {
    // The order-12 tail is sum |kappa| q^13 / (1 - q); q = 0.1 keeps it far below 1e-10.
    for (double s : {0.0, 1.0, 5.0, 30.0}) {
        const PrincipalCurvatures k = principal_curvatures(leaf(), s);
        for (double q : {-0.1, 0.05, 0.1}) {
            const ParallelMeanCurvature h = parallel_mean_curvature(k, q / k.max_abs(), 12);
            CHECK(std::abs(h.exact - h.series) <= 1e-10);
        }
    }
}

TEST_CASE("fermi: smoothstep is a C2 monotone step") {
    CHECK(smoothstep(-1.0) == 0.0);
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(2.0) == 1.0);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5));
    double prev = 0.0;
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        CHECK(smoothstep(x) >= prev);
        prev = smoothstep(x);
    }
    const double h = 1e-4;
    CHECK(std::abs((smoothstep(h) - smoothstep(0.0)) / h) < 1e-6);
    CHECK(std::abs((smoothstep(1.0) - smoothstep(1.0 - h)) / h) < 1e-6);
}

TEST_CASE("fermi: cutoff supports and nesting") {
    const CutoffParams p{0.25, 0.5};
    const double scale = std::sqrt(0.25);
    for (double foot : {0.0, 1.0, 4.0, 20.0}) {
        const double d = GeneratingCurve::d_gamma(foot);
        for (int j = 1; j <= 5; ++j) {
            CHECK(cutoff_chi(j, foot, 0.0, p) == 1.0);
            CHECK(cutoff_chi(j, foot, scale * d, p) == 0.0);
            CHECK(cutoff_chi(j, foot, -1.01 * scale * d, p) == 0.0);
            CHECK(cutoff_chi(j, foot, scale * (d - (2.0 * j - 1.0) / 100.0), p) == 1.0);
        }
        for (double t = -scale * d; t <= scale * d; t += 0.001)
            for (int j = 2; j <= 5; ++j)
                if (cutoff_chi(j, foot, t, p) > 0.0) CHECK(cutoff_chi(j - 1, foot, t, p) == 1.0);
        // |d chi / dt| <= C eps^{-delta} with C = 1.875 * 100 from the step width.
        for (double t = 0.0; t <= scale * d; t += 0.0005)
            CHECK(std::abs(cutoff_chi_dt(2, foot, t, p)) <= 187.5 / scale + 1e-9);
    }
}

TEST_CASE("fermi: approximate solution values") {
    const Grid2D grid({3, 3}, 1.0, 1.0 / 32.0);
    TubeCoordinates tc;
    const std::size_t n = grid.size();
    tc.foot.assign(n, 5.0);
    tc.t.assign(n, 0.0);
    tc.d_gamma.assign(n, GeneratingCurve::d_gamma(5.0));
    tc.valid.assign(n, true);
    tc.t[1] = 3.0 * 0.25;
    tc.t[2] = -3.0 * 0.25;
    tc.t[3] = 10.0;
    tc.t[4] = -10.0;
    const ScalarField2D u = build_approx_solution(grid, tc, {0.25, 0.5, 1});
    CHECK(u.values()[0] == 0.0);
    CHECK(u.values()[1] == doctest::Approx(std::tanh(3.0 / std::numbers::sqrt2)).epsilon(1e-15));
    CHECK(u.values()[2] == doctest::Approx(-std::tanh(3.0 / std::numbers::sqrt2)).epsilon(1e-15));
    CHECK(u.values()[3] == 1.0);
    CHECK(u.values()[4] == -1.0);
    CHECK_THROWS_AS(build_approx_solution(grid, tc, {0.75, 0.5, 1}), InvalidArgument);
    const ScalarField2D flipped = build_approx_solution(grid, tc, {0.25, 0.5, -1});
    CHECK(flipped.values()[3] == -1.0);
}

TEST_CASE("fermi: approximate solution on a grid stays in [-1, 1]") {
    const TubeFixture& f = fixture();
    const ScalarField2D u = build_approx_solution(f.grid, f.tube, {0.25, 0.5, 1});
    for (double v : u.values()) CHECK(std::abs(v) <= 1.0);
    // The origin lies on the cone side of the leaf, the far s1 axis on the other.
    CHECK(u(0, 0) == 1.0);
    CHECK(u(f.grid.cells(), 0) == -1.0);
}

TEST_CASE("fermi: inner residual vanishes on the curve and decays like d^-2") {
    for (double s : {0.0, 3.0, 20.0}) CHECK(std::abs(inner_residual(leaf(), s, 0.0, 0.25)) < 1e-8);
    std::vector<double> d, v;
    for (double s = 2.5; s <= 30.5; s += 0.25) {
        d.push_back(GeneratingCurve::d_gamma(s));
        v.push_back(inner_residual_sup(leaf(), s, 0.25));
    }
    const DecayFit fit = fit_decay_exponent(d, v, 3.0, 30.0);
    CHECK(fit.exponent == doctest::Approx(-2.0).epsilon(0.1));
    for (double s : {4.0, 10.0, 25.0}) {
        const double ratio = inner_residual_sup(leaf(), s, 0.25) / inner_residual_sup(leaf(), s, 0.125);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
    }
}

TEST_CASE("fermi: residual is odd in t on cone curvature data") {
    const PrincipalCurvatures cone{0.0, 0.2, -0.2, 3, 3};
    const HeteroclinicProfile prof(0.25);
    for (double t : {0.01, 0.3, 1.1}) {
        const double a = -0.25 * parallel_mean_curvature(cone, t, 1).exact * prof.dot(t);
        const double b = -0.25 * parallel_mean_curvature(cone, -t, 1).exact * prof.dot(-t);
        CHECK(a == -b);
    }
}

TEST_CASE("fermi: projection normalization, parity and idempotence") {
    const double eps = 0.25;
    const HeteroclinicProfile prof(eps);
    auto udot = [&](double t) { return prof.dot(t); };
    const PiValue one = project_pi(udot, 20.0, eps);
    CHECK_FALSE(one.truncated);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(project_pi(udot, 1.0, eps).truncated);
    CHECK(std::abs(project_pi([&](double t) { return t * prof.dot(t); }, 20.0, eps).value) < 1e-15);

    auto f = [&](double s, double t) { return std::cos(s) * t * t * prof.dot(t) + std::sin(t) + 0.3; };
    // Tube half-width c* d >= 10 eps, so Pi(u_dot) = 1 to quadrature accuracy.
    for (double s : {13.0, 19.0, 40.0}) {
        const double pf = project_pi(leaf(), f, s, eps).value;
        const double ppf = project_pi(leaf(), [&](double, double t) { return pf * prof.dot(t); }, s, eps).value;
        CHECK(ppf == doctest::Approx(pf).epsilon(1e-10));
        const double perp = project_pi(leaf(), [&](double ss, double t) {
            return project_pi_perp(leaf(), f, ss, t, eps);
        }, s, eps).value;
        CHECK(std::abs(perp) < 1e-9);
    }
    CHECK_THROWS_AS(project_pi(leaf(), f, -1.0, eps), InvalidArgument);
}

TEST_CASE("fermi: projected residual decays faster on the (4,4) leaf") {
    const GeneratingCurve c = shoot_hardt_simon({4, 4});
    std::vector<double> d, v;
    for (double s = 2.5; s <= 30.5; s += 0.25) {
        d.push_back(GeneratingCurve::d_gamma(s));
        v.push_back(std::abs(projected_inner_residual(c, s, 0.25).value));
    }
    CHECK(fit_decay_exponent(d, v, 3.0, 30.0).exponent <= -5.0);
    std::vector<double> v33;
    for (double s = 2.5; s <= 30.5; s += 0.25)
        v33.push_back(std::abs(projected_inner_residual(leaf(), s, 0.25).value));
    CHECK(fit_decay_exponent(d, v33, 3.0, 30.0).exponent <= -2.5);
}

TEST_CASE("fermi: D_zeta") {
    const TubeFixture& f = fixture();
    const CutoffParams cp{0.25, 0.5};
    const ScalarField2D u = build_approx_solution(f.grid, f.tube, {0.25, 0.5, 1});

    const ScalarField2D same = apply_dzeta(u, f.map, f.tube, [](double) { return 0.0; }, cp, Direction::forward);
    CHECK(same.values() == u.values());

    // The chi_2 step has width eps^delta / 100, so |zeta| must stay below about 2.7e-3.
    auto zeta = [](double s) { return 0.002 * std::sin(s); };
    const ScalarField2D fwd = apply_dzeta(u, f.map, f.tube, zeta, cp, Direction::forward);
    const ScalarField2D back = apply_dzeta(fwd, f.map, f.tube, zeta, cp, Direction::inverse);
    double err = 0.0;
    for (std::size_t k = 0; k < u.values().size(); ++k) err = std::max(err, std::abs(back.values()[k] - u.values()[k]));
    // Two bilinear resamplings, each off by about h^2 |u''| / 8.
    CHECK(err < 4e-3);

    const double c = 0.002;
    const ScalarField2D shifted = apply_dzeta(u, f.map, f.tube, [&](double) { return c; }, cp, Direction::forward);
    const ZeroSetDeviation dev = zero_set_deviation(zero_set_extract(shifted), f.map, 7.0);
    const ZeroSetDeviation base = zero_set_deviation(zero_set_extract(u), f.map, 7.0);
    auto mean_far = [](const ZeroSetDeviation& z) {
        double sum = 0.0;
        int count = 0;
        for (const auto& [d, t] : z.series)
            if (d >= 2.0) {
                sum += t;
                ++count;
            }
        REQUIRE(count > 0);
        return sum / count;
    };
    CHECK(mean_far(dev) - mean_far(base) == doctest::Approx(c).epsilon(0.1));

    CHECK_THROWS_AS(apply_dzeta(u, f.map, f.tube, [](double) { return 0.01; }, cp, Direction::forward), DomainError);
}

TEST_CASE("fermi: weighted norms") {
    const GeneratingCurve& c = leaf();
    const double nu = -2.0;
    std::vector<double> w(c.size()), one(c.size(), 1.0);
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::pow(GeneratingCurve::d_gamma(c.s(i)), nu);
    CHECK(weighted_norm_curve(c, w, nu, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // With unit balls the local sup reaches one unit back toward the axis.
    CHECK(weighted_norm_curve(c, w, nu, 1.0) > 1.0);
    CHECK(weighted_norm_curve(c, one, 0.0, 1.0) == 1.0);
    CHECK_THROWS_AS(weighted_norm_curve(c, std::vector<double>(3, 1.0), nu), InvalidArgument);

    const TubeFixture& f = fixture();
    const ScalarField2D ones(f.grid, 1.0);
    CHECK(weighted_norm_ambient(ones, 0.0, 0.25) == 1.0);
    CHECK(weighted_norm_tube(ones, f.tube, 0.0, 0.25) == 1.0);
}

TEST_CASE("fermi: tube norm of the inner residual is eps-uniform after scaling by eps^2") {
    double scaled[2];
    for (int k = 0; k < 2; ++k) {
        const double eps = k == 0 ? 0.25 : 0.125;
        const Grid2D grid({3, 3}, 8.0, eps / 8.0);
        const TubularMap map(leaf());
        const TubeCoordinates tc = tube_coordinates(grid, map);
        ScalarField2D w(grid, 0.0);
        for (std::size_t n = 0; n < grid.size(); ++n)
            if (tc.valid[n] && tc.d_gamma[n] >= 1.5) w.values()[n] = inner_residual(leaf(), tc.foot[n], tc.t[n], eps);
        scaled[k] = weighted_norm_tube(w, tc, -2.0, eps) / (eps * eps);
        CHECK(std::isfinite(scaled[k]));
    }
    CHECK(scaled[0] / scaled[1] <= 2.0);
    CHECK(scaled[1] / scaled[0] <= 2.0);
}
