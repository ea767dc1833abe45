#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <json.hpp>

#include "extlab/experiments/selftest.hpp"
#include "extlab/exppoly.hpp"
#include "extlab/hilbert.hpp"
#include "extlab/quadrature.hpp"

using namespace extlab;
using experiments::detail::pointwise_residual;
using experiments::detail::random_exppoly;

namespace {
// Central difference of p at x, a numeric oracle for differentiate.
Complex numeric_derivative(const ExpPoly& p, double x, double h = 1e-5) {
    return (p(x + h) - p(x - h)) / (2.0 * h);
}
}  // namespace

TEST_CASE("canonical form merges, drops and sorts", "[exppoly]") {
    const ExpPoly p = ExpPoly::from_terms({{1.0, 0, 2.0}, {2.0, 0, 2.0}, {1.0, 1, 1.0}, {1e-15, 0, 3.0}});
    REQUIRE(p.terms().size() == 2);
    CHECK(p.terms()[0].rate == Complex(1.0));
    CHECK(p.terms()[1].coeff == Complex(3.0));
    CHECK((p - p).is_zero());
    CHECK((Complex(0.0) * p).is_zero());
    CHECK(ExpPoly::exp(1.0) + ExpPoly::exp(1.0 + 1e-12) == ExpPoly::term(2.0, 0, 1.0));
}

TEST_CASE("non-decaying rates are rejected", "[exppoly]") {
    CHECK_THROWS_AS(ExpPoly::exp(0.0), InvalidArgument);
    CHECK_THROWS_AS(ExpPoly::exp(Complex(-1.0, 2.0)), InvalidArgument);
    CHECK_THROWS_AS(decay_rate(Complex(1.0)), InvalidArgument);
}

TEST_CASE("evaluation, derivative and boundary values", "[exppoly]") {
    const ExpPoly p = ExpPoly::term(Complex(1, 1), 2, Complex(1.5, 0.5)) + ExpPoly::term(0.5, 0, 1.0);
    const double x = 0.7;
    const Complex want = Complex(1, 1) * x * x * std::exp(-Complex(1.5, 0.5) * x) + 0.5 * std::exp(-x);
    CHECK(std::abs(p(x) - want) <= 1e-15);
    for (double y : {0.1, 1.0, 3.0}) CHECK(std::abs(differentiate(p)(y) - numeric_derivative(p, y)) <= 1e-8);
    const auto bv = boundary_values(p);
    CHECK(bv.value == Complex(0.5));
    CHECK(std::abs(bv.derivative - Complex(-0.5)) <= 1e-15);
    CHECK(conjugate(p)(x) == std::conj(p(x)));
}

TEST_CASE("inner products: hand values", "[exppoly]") {
    CHECK(std::abs(inner_product(ExpPoly::exp(1.0), ExpPoly::exp(1.0)) - 0.5) <= 1e-15);
    CHECK(std::abs(inner_product(ExpPoly::term(1.0, 2, 1.0), ExpPoly::term(1.0, 2, 1.0)) - 0.75) <= 1e-15);
    CHECK(std::abs(norm(ExpPoly::term(std::sqrt(2.0), 0, 1.0)) - 1.0) <= 1e-15);
    // anti-linear in the first slot
    const ExpPoly p = ExpPoly::exp(Complex(1, 1));
    const ExpPoly q = ExpPoly::term(1.0, 1, 2.0);
    CHECK(std::abs(inner_product(Complex(0, 1) * p, q) - Complex(0, -1) * inner_product(p, q)) <= 1e-15);
    CHECK(std::abs(inner_product(p, q) - std::conj(inner_product(q, p))) <= 1e-15);
}

TEST_CASE("inner products against quadrature", "[exppoly][property]") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const ExpPoly p = random_exppoly(rng);
        const ExpPoly q = random_exppoly(rng);
        const auto quad = oracle::quadrature_inner_product(p, q);
        CHECK(std::abs(inner_product(p, q) - quad.value) <= 1e-10 * std::max(1.0, norm(p) * norm(q)));
    }
}

TEST_CASE("shifted symbol", "[exppoly]") {
    for (Complex l : {Complex(1.0), Complex(0.7, 0.3), Complex(2.0, -1.0)}) {
        for (Complex z : {Complex(0.0), Complex(0.0, 0.1), Complex(0.0, -0.5)}) {
            CHECK(std::abs(shifted_symbol(l, z) - ((1.0 - z) - l * l)) <= 1e-14);
        }
    }
}

TEST_CASE("apply_shifted is -u'' + (1 - z) u", "[exppoly][property]") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 30; ++i) {
        const ExpPoly u = random_exppoly(rng);
        const Complex z(0.0, 0.3);
        // pointwise_residual(u, f, z) = max |-u'' + (1 - z) u - f|
        CHECK(pointwise_residual(u, apply_shifted(u, z), z) <= 1e-10 * std::max(1.0, u.max_coeff()));
    }
}

TEST_CASE("solve_resolvent: golden Friedrichs inverse", "[exppoly]") {
    const ExpPoly u = solve_resolvent(ExpPoly::exp(1.0), 0.0, BoundaryCondition::Dirichlet);
    CHECK(norm(u - ExpPoly::term(0.5, 1, 1.0)) <= 1e-14);
    const ExpPoly v = solve_resolvent(ExpPoly::exp(2.0), 0.0, BoundaryCondition::Dirichlet);
    CHECK(norm(v - (Complex(1.0 / 3.0) * (ExpPoly::exp(1.0) - ExpPoly::exp(2.0)))) <= 1e-14);
}

TEST_CASE("solve_resolvent property: residual and boundary trace", "[exppoly][property]") {
    std::mt19937_64 rng(4);
    const Complex points[] = {0.0, Complex(0.0, 0.5), Complex(0.0, -1e-3), Complex(0.0, 1e-5)};
    for (int i = 0; i < 40; ++i) {
        const ExpPoly f = random_exppoly(rng, 2);
        const Complex z = points[i % 4];
        const ExpPoly u = solve_resolvent(f, z, BoundaryCondition::Dirichlet);
        const double scale = std::max(1.0, f.max_coeff());
        CHECK(pointwise_residual(u, f, z) <= 1e-10 * scale);
        CHECK(std::abs(u(0.0)) <= 1e-12 * scale);
    }
}

TEST_CASE("solve_resolvent: resonant right-hand side", "[exppoly]") {
    const Complex z(0.0, 0.2);
    const ExpPoly f = ExpPoly::term(1.0, 1, decay_rate(z));
    const ExpPoly u = solve_resolvent(f, z, BoundaryCondition::Dirichlet);
    CHECK(pointwise_residual(u, f, z) <= 1e-12);
    CHECK(std::abs(u(0.0)) <= 1e-14);
}

TEST_CASE("solve_resolvent: closure inverse and its range", "[exppoly]") {
    // <e^{-x}, e^{-2x}> = 1/3 and <e^{-x}, e^{-x}> = 1/2, so f is orthogonal to e^{-x}
    const ExpPoly f = ExpPoly::exp(2.0) - Complex(2.0 / 3.0) * ExpPoly::exp(1.0);
    const ExpPoly u = solve_resolvent(f, 0.0, BoundaryCondition::DoubleZero);
    const auto bv = boundary_values(u);
    CHECK(std::abs(bv.value) <= 1e-14);
    CHECK(std::abs(bv.derivative) <= 1e-12);
    CHECK(pointwise_residual(u, f, 0.0) <= 1e-12);
    CHECK_THROWS_AS(solve_resolvent(ExpPoly::exp(2.0), 0.0, BoundaryCondition::DoubleZero), NotInRange);
}

TEST_CASE("solve_resolvent: rejected points", "[exppoly]") {
    const ExpPoly f = ExpPoly::exp(1.0);
    CHECK_THROWS_AS(solve_resolvent(f, Complex(0.0, 0.6), BoundaryCondition::Dirichlet), InvalidArgument);
    CHECK_THROWS_AS(solve_resolvent(f, Complex(0.1, 0.1), BoundaryCondition::Dirichlet), InvalidArgument);
    CHECK_THROWS_AS(solve_resolvent(f, Complex(0.0, 0.1), BoundaryCondition::DoubleZero), InvalidArgument);
    CHECK(is_accepted_resolvent_point(0.0));
    CHECK_FALSE(is_accepted_resolvent_point(1.0));
}

TEST_CASE("JSON round trip", "[exppoly][hilbert]") {
    std::mt19937_64 rng(1);
    const ExpPoly p = random_exppoly(rng);
    const nlohmann::json j = p;
    CHECK(j.get<ExpPoly>() == p);
    const HilbertElement h{p, random_exppoly(rng)};
    const nlohmann::json jh = h;
    CHECK(norm(jh.get<HilbertElement>() - h) == 0.0);
}

TEST_CASE("Hilbert elements: channels, projections, coordinates", "[hilbert]") {
    const HilbertElement a{ExpPoly::term(std::sqrt(2.0), 0, 1.0), ExpPoly()};
    const HilbertElement b{ExpPoly(), ExpPoly::term(std::sqrt(2.0), 0, 1.0)};
    CHECK(std::abs(inner_product(a, b)) == 0.0);
    const HilbertElement h = Complex(2.0) * a - Complex(0, 1) * b;
    const auto c = coordinates({a, b}, h);
    CHECK(std::abs(c[0] - 2.0) <= 1e-14);
    CHECK(std::abs(c[1] - Complex(0, -1)) <= 1e-14);
    CHECK(norm(project_onto({a}, h) - Complex(2.0) * a) <= 1e-14);
    CHECK(norm(combine({a, b}, c, 2) - h) <= 1e-14);
    CHECK_THROWS_AS(a + HilbertElement{ExpPoly()}, DimensionMismatch);
}

TEST_CASE("quadrature_norm agrees with the closed form", "[quadrature]") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 10; ++i) {
        const HilbertElement h{random_exppoly(rng), random_exppoly(rng)};
        CHECK(quadrature_norm(h) == Catch::Approx(norm(h)).epsilon(1e-10));
    }
    // a difference of large terms that cancel to a small remainder:
    // |e^{-x} - e^{-(1 + i d) x}| ~ d x e^{-x}, whose norm is d / 2
    const double d = 1e-6;
    const HilbertElement diff{ExpPoly::term(1e8, 0, 1.0) - ExpPoly::term(1e8, 0, Complex(1.0, d))};
    CHECK(quadrature_norm(diff) == Catch::Approx(1e8 * d * 0.5).epsilon(1e-5));
}
