#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "extlab/models.hpp"
#include "extlab/quadrature.hpp"

using namespace extlab;

namespace {

// <S* f, g> - <f, S* g> = sum over stored channels of conj(f'(0)) g(0) - conj(f(0)) g'(0),
// read off the stored functions directly (no trace layout involved).
Complex boundary_form(const HilbertElement& f, const HilbertElement& g) {
    Complex s;
    for (std::size_t c = 0; c < f.channel_count(); ++c) {
        const auto bf = boundary_values(f.channel(c));
        const auto bg = boundary_values(g.channel(c));
        s += std::conj(bf.derivative) * bg.value - std::conj(bf.value) * bg.derivative;
    }
    return s;
}

template <SymmetricModel M>
Complex green_defect(const M& model, const HilbertElement& f, const HilbertElement& g) {
    return inner_product(model.apply_adjoint(f), g) - inner_product(f, model.apply_adjoint(g));
}

}  // namespace

TEMPLATE_TEST_CASE("model basics", "[models]", HalfLineModel, TwoHalfLinesModel) {
    const TestType m;
    CHECK(m.deficiency_index() == m.channel_count());
    CHECK(m.lower_bound() == 1.0);
    CHECK_THROWS_AS(m.apply_adjoint(HilbertElement(3)), DimensionMismatch);
    CHECK_THROWS_AS(m.lift_trace(TraceVector(5)), DimensionMismatch);
}

TEMPLATE_TEST_CASE("deficiency basis is orthonormal and in the kernel", "[models]", HalfLineModel,
                   TwoHalfLinesModel) {
    const TestType m;
    for (Complex z : {Complex(0.0), Complex(0.0, 0.5), Complex(0.0, -1e-3)}) {
        const auto b = m.deficiency_basis(z);
        REQUIRE(b.size() == m.deficiency_index());
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(norm(m.apply_shifted(b[i], z)) <= 1e-14);
            for (std::size_t j = 0; j < b.size(); ++j)
                CHECK(std::abs(inner_product(b[i], b[j]) - (i == j ? 1.0 : 0.0)) <= 1e-14);
        }
    }
}

TEST_CASE("kappa normalizes the deficiency vector", "[models]") {
    for (double eps : {0.5, 1e-1, 1e-4}) {
        const Complex k = std::sqrt(Complex(1.0, -eps));
        CHECK(kappa(eps) * std::sqrt(2.0) == Catch::Approx(std::sqrt(2.0 * k.real())).epsilon(1e-14));
    }
}

TEMPLATE_TEST_CASE("traces and lifts", "[models][property]", HalfLineModel, TwoHalfLinesModel) {
    const TestType m;
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        TraceVector t(2 * m.channel_count());
        for (auto& x : t) x = Complex(g(rng), g(rng));
        const TraceVector back = m.boundary_trace(m.lift_trace(t));
        for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(back[k] - t[k]) <= 1e-14);
    }
    for (const auto& f : sample_closure_domain(m, 5, 3)) CHECK(m.closure_membership(f));
    for (const auto& f : sample_adjoint_domain(m, 5, 3)) CHECK_FALSE(m.closure_membership(f));
}

TEST_CASE("two half-lines: the left channel is stored reflected", "[models]") {
    const TwoHalfLinesModel m;
    // g(x) = e^{-|x|}: g_-'(0) = +1 in physical orientation, g_+'(0) = -1
    const HilbertElement g{ExpPoly::exp(1.0), ExpPoly::exp(1.0)};
    const TraceVector t = m.boundary_trace(g);
    CHECK(t[0] == Complex(1.0));
    CHECK(t[1] == Complex(1.0));
    CHECK(t[2] == Complex(1.0));
    CHECK(t[3] == Complex(-1.0));
}

TEMPLATE_TEST_CASE("Green's identity on D(S*)", "[models][property]", HalfLineModel, TwoHalfLinesModel) {
    const TestType m;
    const auto probes = sample_adjoint_domain(m, 6, 19);
    for (const auto& f : probes)
        for (const auto& g : probes)
            CHECK(std::abs(green_defect(m, f, g) - boundary_form(f, g)) <= 1e-12 * std::max(1.0, norm(f) * norm(g)));
}

TEMPLATE_TEST_CASE("S* is symmetric on the closure domain", "[models][property]", HalfLineModel,
                   TwoHalfLinesModel) {
    const TestType m;
    const auto probes = sample_closure_domain(m, 5, 23);
    for (const auto& f : probes) {
        CHECK(inner_product(f, m.apply_adjoint(f)).real() >= m.lower_bound() * inner_product(f, f).real() - 1e-12);
        for (const auto& g : probes) CHECK(std::abs(green_defect(m, f, g)) <= 1e-12);
    }
}

TEMPLATE_TEST_CASE("resolvents invert S*", "[models][property]", HalfLineModel, TwoHalfLinesModel) {
    const TestType m;
    for (const auto& g : sample_adjoint_domain(m, 4, 31)) {
        const HilbertElement u = m.distinguished_resolvent(g);
        CHECK(quadrature_norm(m.apply_adjoint(u) - g) <= 1e-10 * norm(g));
        for (std::size_t c = 0; c < m.channel_count(); ++c) CHECK(std::abs(u.channel(c)(0.0)) <= 1e-12);
        // bound ||S_F^{-1}|| <= 1
        CHECK(norm(u) <= m.distinguished_inverse_bound() * norm(g) + 1e-12);
    }
    for (const auto& f : sample_closure_domain(m, 4, 37)) {
        const HilbertElement sf = m.apply_adjoint(f);
        CHECK(quadrature_norm(m.closure_solve(sf) - f) <= 1e-10 * norm(f));
    }
    CHECK_THROWS_AS(m.closure_solve(m.deficiency_basis(0.0)[0]), NotInRange);
}

TEMPLATE_TEST_CASE("Friedrichs extension is self-adjoint on its domain", "[models][property]", HalfLineModel,
                   TwoHalfLinesModel) {
    const TestType m;
    const auto ext = make_friedrichs_extension(m);
    const auto probes = sample_domain(ext, 2 * m.channel_count() + 2, 41);
    for (const auto& f : probes) {
        CHECK(ext.contains(f));
        for (const auto& g : probes) CHECK(std::abs(boundary_form(f, g)) <= 1e-12 * std::max(1.0, norm(f) * norm(g)));
    }
    CHECK(ext.admissible_traces().size() == m.channel_count());
}

TEST_CASE("S_alpha domain and boundary form", "[models][property]") {
    for (double alpha : {-2.0, 0.0, 1.5}) {
        const auto ext = make_salpha_extension(alpha);
        const auto probes = sample_domain(ext, 5, 43);
        for (const auto& f : probes) {
            CHECK(ext.contains(f));
            const TraceVector t = ext.model().boundary_trace(f);
            CHECK(std::abs(t[0] - t[2]) <= 1e-12);
            CHECK(std::abs((t[3] - t[1]) - alpha * t[2]) <= 1e-12 * std::max(1.0, std::abs(t[2])));
            for (const auto& g : probes) CHECK(std::abs(boundary_form(f, g)) <= 1e-12 * std::max(1.0, norm(f) * norm(g)));
        }
    }
    const auto ext = make_salpha_extension(1.0);
    const HilbertElement bad{ExpPoly::exp(1.0), ExpPoly()};
    CHECK_FALSE(ext.contains(bad));
    CHECK_THROWS_AS(ext.apply(bad), NotInDomain);
}

TEST_CASE("extension_from_traces reproduces the constraints", "[models]") {
    const TwoHalfLinesModel m;
    const auto salpha = make_salpha_extension(0.5);
    const auto rebuilt = extension_from_traces("copy", m, salpha.admissible_traces());
    for (const auto& g : sample_domain(salpha, 4, 47)) CHECK(rebuilt.contains(g));
    for (const auto& g : sample_adjoint_domain(m, 3, 53)) CHECK_FALSE(rebuilt.contains(g));
    CHECK_THROWS_AS(extension_from_traces("bad", m, {TraceVector(3)}), DimensionMismatch);
    CHECK_THROWS_AS(Extension<TwoHalfLinesModel>("bad", m, ComplexMatrix(2, 3)), DimensionMismatch);
}
