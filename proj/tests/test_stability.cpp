#include "aclab/error.hpp"
#include "aclab/minsurf.hpp"
#include "aclab/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace aclab;

namespace {

const GeneratingCurve& leaf() {
    static const GeneratingCurve c = shoot_hardt_simon({3, 3});
    return c;
}

ScalarField2D solve_on(double R, double eps = 0.25) {
    const Grid2D g({3, 3}, R, eps / 8.0);
    const TubularMap map(leaf());
    const ScalarField2D approx = build_approx_solution(g, tube_coordinates(g, map), {eps, 0.5, 1});
    NewtonReport rep;
    return newton_solve(g, eps, approx, {}, rep);
}

const ScalarField2D& solution8() {
    static const ScalarField2D u = solve_on(8.0);
    return u;
}

ScalarField2D random_interior(const Grid2D& g, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ScalarField2D v(g);
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i = 0; i < g.cells(); ++i) v(i, j) = n(rng);
    return v;
}

}  // namespace

TEST_CASE("stability: spectrum of the constant state") {
    const Grid2D g({3, 3}, 2.0, 1.0 / 32.0);
    SpectrumOptions opts;
    opts.shift = 1.9;
    opts.k = 3;
    const SpectrumReport sp = linearization_spectrum(ScalarField2D(g, 1.0), 0.25, opts);
    REQUIRE(sp.eigenvalues.size() == 3);
    CHECK(sp.converged);
    CHECK(sp.eigenvalues[0] >= 2.0);
    for (std::size_t i = 1; i < 3; ++i) CHECK(sp.eigenvalues[i] >= sp.eigenvalues[i - 1]);
    CHECK(sp.orthonormality_defect < 1e-10);
    // Stopping on the Ritz values leaves residuals near sqrt(tol).
    for (double r : sp.residuals) CHECK(r < 1e-4);
    // Ground state of -eps^2 Delta_red + 2 on the box is a product of positive radial modes.
    const ScalarField2D& v = sp.eigenfields[0];
    const double sign = v(0, 0) > 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < g.cells(); ++j)
        for (std::size_t i = 0; i < g.cells(); ++i) CHECK(sign * v(i, j) > 0.0);
}

TEST_CASE("stability: linearization is self-adjoint in the volume inner product") {
    const ScalarField2D& u = solution8();
    const AssembledOperator op = assemble_operator(u.grid(), 0.25, &u);
    std::mt19937_64 rng(5);
    const ScalarField2D a = random_interior(u.grid(), rng), b = random_interior(u.grid(), rng);
    const ScalarField2D ja = op.apply(a), jb = op.apply(b);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < u.grid().side(); ++j)
        for (std::size_t i = 0; i < u.grid().side(); ++i) {
            const double V = u.grid().cell_volume(i, j);
            lhs += V * ja(i, j) * b(i, j);
            rhs += V * a(i, j) * jb(i, j);
            scale += V * std::abs(ja(i, j) * b(i, j));
        }
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
}

TEST_CASE("stability: spectrum rejects non-solutions") {
    const Grid2D g({3, 3}, 2.0, 1.0 / 32.0);
    CHECK_THROWS_AS(linearization_spectrum(ScalarField2D(g, 0.5), 0.25), InvalidArgument);
}

TEST_CASE("stability: lowest eigenvalue does not increase with the box") {
    const SpectrumReport s4 = linearization_spectrum(solve_on(4.0), 0.25);
    const SpectrumReport s8 = linearization_spectrum(solution8(), 0.25);
    CHECK(s4.converged);
    CHECK(s8.converged);
    CHECK(s8.eigenvalues.front() > 0.0);
    CHECK(s8.eigenvalues.front() <= s4.eigenvalues.front());
    CHECK(s8.orthonormality_defect < 1e-8);
}

TEST_CASE("stability: dilation field is a positive kernel element") {
    const ScalarField2D& u = solution8();
    DilationOptions opts;
    const PhiReport p = phi_from_dilation(leaf(), u, opts);
    CHECK(p.positive);
    CHECK(p.min_interior > 0.0);
    CHECK(p.kernel_residual < 1e-9);
    CHECK(p.fd_kernel_residual < 1e-4);
    CHECK(p.fd_agreement < 1e-4);
    CHECK(p.tube_agreement < 0.2);
    CHECK(p.negative_pivots == 0);
    CHECK(p.plus.converged);
    CHECK(p.minus.converged);

    opts.lambda_step *= 0.5;
    const PhiReport half = phi_from_dilation(leaf(), u, opts);
    CHECK(half.positive);
    // The tangent field does not depend on the step; the difference quotient converges to it.
    CHECK(half.phi.values() == p.phi.values());
    CHECK(half.fd_agreement < p.fd_agreement * 0.5 + 1e-7);

    SUBCASE("quadratic form") {
        const auto psis = random_test_functions(leaf(), u.grid(), 0.25, 8, 42);
        REQUIRE(psis.size() == 8);
        const auto trials = quadratic_form_check(u, 0.25, p.phi, psis);
        for (const QuadraticTrial& t : trials) {
            CHECK(t.norm2 > 0.0);
            CHECK(t.q > 0.0);
            CHECK(t.gap <= 1e-10 * std::abs(t.q) + 1e-14);
            CHECK(t.rearranged == doctest::Approx(t.q).epsilon(1e-9));
        }
        // Same seed, same trials.
        const auto again = random_test_functions(leaf(), u.grid(), 0.25, 8, 42);
        CHECK(again[3].values() == psis[3].values());
    }
}

TEST_CASE("stability: quadratic form identity with a constant ground state") {
    const Grid2D g({3, 3}, 2.0, 1.0 / 32.0);
    const ScalarField2D one(g, 1.0);
    const AssembledOperator op = assemble_operator(g, 0.25, &one);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        const ScalarField2D psi = random_interior(g, rng);
        const QuadraticTrial t = quadratic_form(op, one, psi);
        CHECK(t.q > 0.0);
        // phi = 1 is a strict supersolution here, so the remainder is at least 2 ||psi||^2.
        CHECK(t.q >= t.rearranged + 2.0 * t.norm2 * (1.0 - 1e-12));
    }
}
