#include "aclab/error.hpp"
#include "aclab/profile1d.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace aclab;

TEST_CASE("profile: closed form at the origin") {
    const ProfileSample p = evaluate_profile(0.0);
    CHECK(p.u == 0.0);
    CHECK(p.du == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
    CHECK(p.ddu == 0.0);
}

TEST_CASE("profile: first integral and ODE hold pointwise") {
    for (double t = -30.0; t <= 30.0; t += 0.37) {
        const ProfileSample p = evaluate_profile(t);
        CHECK(std::abs(p.energy) <= 1e-14);
        // u'' = u^3 - u
        CHECK(std::abs(p.ddu - (p.u * p.u * p.u - p.u)) <= 1e-14);
        CHECK(p.du > 0.0);
    }
}

TEST_CASE("profile: odd symmetry and limits") {
    for (double t : {0.1, 1.0, 3.5, 12.0}) {
        CHECK(evaluate_profile(-t).u == doctest::Approx(-evaluate_profile(t).u).epsilon(1e-15));
        CHECK(evaluate_profile(-t).du == doctest::Approx(evaluate_profile(t).du).epsilon(1e-15));
    }
    CHECK(evaluate_profile(40.0).u == doctest::Approx(1.0));
    CHECK(evaluate_profile(-40.0).u == doctest::Approx(-1.0));
}

TEST_CASE("profile: scaled family and tail defect") {
    const HeteroclinicProfile p(0.25);
    CHECK(p.value(0.25) == doctest::Approx(std::tanh(1.0 / std::numbers::sqrt2)).epsilon(1e-15));
    CHECK(p.dot(0.5) == doctest::Approx(evaluate_profile(2.0).du).epsilon(1e-15));
    // 1 - tanh(a) = 2 e^{-2a} / (1 + e^{-2a}) without cancellation
    const double a = 20.0 / std::numbers::sqrt2;
    const double want = 2.0 * std::exp(-2.0 * a) / (1.0 + std::exp(-2.0 * a));
    CHECK(p.defect(5.0) == doctest::Approx(want).epsilon(1e-13));
    CHECK(p.defect(-5.0) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("profile: moments") {
    const ProfileMoments m = profile_moments(2);
    CHECK(m.c == doctest::Approx(2.0 * std::numbers::sqrt2 / 3.0).epsilon(1e-13));
    // Oracle: 30-digit adaptive quadrature of t^{2k} (u1')^2.
    CHECK(m.m2k[0] == doctest::Approx(0.60804966944879875).epsilon(1e-12));
    CHECK(m.m2k[1] == doctest::Approx(1.4093011057154039).epsilon(1e-12));
    CHECK_THROWS_AS(profile_moments(-1), InvalidArgument);
}

TEST_CASE("profile: L0 spectrum") {
    const L0Spectrum s = l0_eigencheck(20.0, 0.01);
    CHECK(std::abs(s.lambda0) < 1e-3);
    CHECK(std::abs(s.lambda1 - 1.5) < 1e-3);
    CHECK(s.spectrum_edge == 2.0);
    CHECK(s.w0_identity_residual <= 1e-12);
    CHECK(s.w1_identity_residual <= 1e-12);
    CHECK_THROWS_AS(l0_eigencheck(20.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(l0_eigencheck(10.0, 0.01), InvalidArgument);
}

TEST_CASE("profile: L0 is coercive off the translation mode") {
    const L0Grid grid{20.0, 0.01};
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> w(grid.size());
        const double c = -4.0 + 8.0 * (trial / 9.0), width = 0.5 + 0.3 * trial;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double t = grid.node(i);
            w[i] = std::exp(-(t - c) * (t - c) / (2.0 * width * width)) * (1.0 + 0.1 * gauss(rng));
        }
        project_out_translation(grid, w);
        double norm2 = 0.0;
        for (double v : w) norm2 += grid.spacing * v * v;
        // Second eigenvalue is 3/2; the discrete form sits above it up to O(h^2).
        CHECK(l0_quadratic_form(grid, w) >= (1.5 - 1e-3) * norm2);
    }
}

TEST_CASE("profile: translation mode is the kernel of the quadratic form") {
    const L0Grid grid{20.0, 0.01};
    std::vector<double> w(grid.size());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = evaluate_profile(grid.node(i)).du;
        norm2 += grid.spacing * w[i] * w[i];
    }
    CHECK(std::abs(l0_quadratic_form(grid, w)) <= 1e-4 * norm2);
    project_out_translation(grid, w);
    for (double v : w) CHECK(std::abs(v) <= 1e-12);
}
