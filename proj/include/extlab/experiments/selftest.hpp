#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "extlab/calculus.hpp"
#include "extlab/experiments/report.hpp"
#include "extlab/exppoly.hpp"
#include "extlab/linalg.hpp"
#include "extlab/models.hpp"
#include "extlab/quadrature.hpp"

namespace extlab::experiments {

namespace fixtures {
// Hand-computed values: <x^m e^{-a x}, x^n e^{-b x}> = (m+n)! / (conj(a) + b)^{m+n+1},
// S_F^{-1} e^{-x} = x e^{-x} / 2, S_F^{-1} e^{-2x} = (e^{-x} - e^{-2x}) / 3.
inline constexpr const char* kGolden = R"json({
  "inner": [
    {"a": [[1, 0, 0, 1, 0]], "b": [[1, 0, 0, 1, 0]], "re": 0.5, "im": 0.0},
    {"a": [[1, 0, 1, 1, 0]], "b": [[1, 0, 0, 1, 0]], "re": 0.25, "im": 0.0},
    {"a": [[1, 0, 2, 1, 0]], "b": [[1, 0, 2, 1, 0]], "re": 0.75, "im": 0.0},
    {"a": [[1, 0, 0, 1, 1]], "b": [[1, 0, 0, 1, 0]], "re": 0.4, "im": 0.2},
    {"a": [[0, 1, 0, 2, 0]], "b": [[1, 0, 1, 1, 0]], "re": 0.0, "im": -0.1111111111111111}
  ],
  "friedrichs_inverse": [
    {"f": [[1, 0, 0, 1, 0]], "u": [[0.5, 0, 1, 1, 0]]},
    {"f": [[1, 0, 0, 2, 0]], "u": [[0.3333333333333333, 0, 0, 1, 0], [-0.3333333333333333, 0, 0, 2, 0]]}
  ]
})json";

/// Rows are [re_coeff, im_coeff, power, re_rate, im_rate].
inline ExpPoly parse(const nlohmann::json& rows) {
    std::vector<ExpPolyTerm> terms;
    for (const auto& r : rows) {
        terms.push_back({Complex(r[0].get<double>(), r[1].get<double>()), r[2].get<unsigned>(),
                         Complex(r[3].get<double>(), r[4].get<double>())});
    }
    return ExpPoly::from_terms(std::move(terms));
}
}  // namespace fixtures

namespace detail {
inline ExpPoly random_exppoly(std::mt19937_64& rng, unsigned max_power = 3) {
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<unsigned> power(0, max_power);
    std::uniform_real_distribution<double> re_rate(0.3, 3.0);
    std::uniform_real_distribution<double> im_rate(-2.0, 2.0);
    std::normal_distribution<double> coeff(0.0, 1.0);
    std::vector<ExpPolyTerm> terms;
    const int n = nterms(rng);
    for (int i = 0; i < n; ++i) {
        const double cr = coeff(rng);
        const double ci = coeff(rng);
        const unsigned m = power(rng);
        const double rr = re_rate(rng);
        terms.push_back({Complex(cr, ci), m, Complex(rr, im_rate(rng))});
    }
    return ExpPoly::from_terms(std::move(terms));
}

/// max |-u'' + (1 - z) u - f| on a grid of [0, 20], with u'' from two
/// symbolic derivatives (a different code path from the solver's symbol).
inline double pointwise_residual(const ExpPoly& u, const ExpPoly& f, Complex z) {
    const ExpPoly u2 = differentiate(differentiate(u));
    double r = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = 0.05 * i;
        r = std::max(r, std::abs(-u2(x) + (1.0 - z) * u(x) - f(x)));
    }
    return r;
}
}  // namespace detail

struct SelftestConfig {
    std::size_t quadrature_pairs = 200;
    std::size_t resolvent_cases = 100;
    std::uint64_t seed = 2024;
    double quadrature_tol = 1e-9;
    double residual_tol = 1e-10;
    double decomposition_tol = 1e-9;
};

inline CheckReport cmd_selftest(const SelftestConfig& cfg = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckReport report;
    report.title = "selftest";
    std::mt19937_64 rng(cfg.seed);

    // symbolic inner products against adaptive quadrature
    double worst_quad = 0.0;
    for (std::size_t i = 0; i < cfg.quadrature_pairs; ++i) {
        const ExpPoly p = detail::random_exppoly(rng);
        const ExpPoly q = detail::random_exppoly(rng);
        const Complex exact = inner_product(p, q);
        const auto quad = oracle::quadrature_inner_product(p, q);
        const double scale = std::max(1.0, norm(p) * norm(q));
        worst_quad = std::max(worst_quad, (std::abs(exact - quad.value) + quad.tail_bound) / scale);
    }
    report.add(check_le("quadrature oracle (" + std::to_string(cfg.quadrature_pairs) + " pairs)", worst_quad,
                        cfg.quadrature_tol, "|<p,q> closed form - quadrature| <= 1e-9 max(1, ||p|| ||q||)"));

    // resolvent residuals
    double worst_res = 0.0;
    double worst_trace = 0.0;
    const Complex points[] = {0.0, Complex(0.0, 0.5), Complex(0.0, -0.1), Complex(0.0, 1e-3), Complex(0.0, -1e-5)};
    for (std::size_t i = 0; i < cfg.resolvent_cases; ++i) {
        const ExpPoly f = detail::random_exppoly(rng, 2);
        const Complex z = points[i % std::size(points)];
        const ExpPoly u = solve_resolvent(f, z, BoundaryCondition::Dirichlet);
        const double scale = std::max(1.0, f.max_coeff());
        worst_res = std::max(worst_res, detail::pointwise_residual(u, f, z) / scale);
        worst_trace = std::max(worst_trace, std::abs(u(0.0)) / scale);
    }
    // the closure inverse on ran(closure): remove the e^{-x} component first
    for (std::size_t i = 0; i < cfg.resolvent_cases / 4; ++i) {
        const ExpPoly raw = detail::random_exppoly(rng, 2);
        const ExpPoly e = ExpPoly::term(std::sqrt(2.0), 0, 1.0);
        const ExpPoly f = raw - inner_product(e, raw) * e;
        const ExpPoly u = solve_resolvent(f, 0.0, BoundaryCondition::DoubleZero);
        const double scale = std::max(1.0, f.max_coeff());
        const auto bv = boundary_values(u);
        worst_res = std::max(worst_res, detail::pointwise_residual(u, f, 0.0) / scale);
        worst_trace = std::max({worst_trace, std::abs(bv.value) / scale, std::abs(bv.derivative) / scale});
    }
    report.add(check_le("resolvent residuals", worst_res, cfg.residual_tol,
                        "max_x |-u'' + (1 - z) u - f| <= 1e-10 max(1, max|f coeff|)"));
    report.add(check_le("resolvent boundary traces", worst_trace, cfg.residual_tol,
                        "|u(0)| (and |u'(0)| for the closure) <= 1e-10"));

    // Gram matrix of orthonormalized random sets
    double worst_gram = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ExpPoly> v;
        for (int k = 0; k < 5; ++k) v.push_back(detail::random_exppoly(rng));
        const auto q = orthonormalize(v, [](const ExpPoly& a, const ExpPoly& b) { return inner_product(a, b); });
        const ComplexMatrix g = gram(q, [](const ExpPoly& a, const ExpPoly& b) { return inner_product(a, b); });
        worst_gram = std::max(worst_gram, (g - ComplexMatrix::identity(q.size())).max_abs());
    }
    report.add(check_le("orthonormalized Gram", worst_gram, 1e-10, "max |G - I| <= 1e-10"));

    // golden ExpPoly fixtures
    const auto golden = nlohmann::json::parse(fixtures::kGolden);
    double worst_golden = 0.0;
    for (const auto& f : golden["inner"]) {
        const Complex v = inner_product(fixtures::parse(f["a"]), fixtures::parse(f["b"]));
        worst_golden = std::max(worst_golden, std::abs(v - Complex(f["re"].get<double>(), f["im"].get<double>())));
    }
    for (const auto& f : golden["friedrichs_inverse"]) {
        const ExpPoly u = solve_resolvent(fixtures::parse(f["f"]), 0.0, BoundaryCondition::Dirichlet);
        worst_golden = std::max(worst_golden, norm(u - fixtures::parse(f["u"])));
    }
    report.add(check_le("golden fixtures", worst_golden, 1e-12, "closed forms match hand-computed values to 1e-12"));

    // direct-sum reconstruction residuals on both models
    double worst_sum = 0.0;
    auto direct_sums = [&](const auto& model) {
        for (const auto& g : sample_adjoint_domain(model, 4, cfg.seed)) {
            const double scale = std::max(1.0, norm(g));
            const KvbDecomposition k = decompose_kvb(model, g);
            worst_sum = std::max(worst_sum,
                                 quadrature_norm(g - (k.f + model.distinguished_resolvent(k.u1) + k.u0)) / scale);
            for (double eps : {0.5, 1e-2, 1e-4, 1e-5}) {
                const VnDecomposition d = decompose_vn(model, g, eps);
                worst_sum = std::max(worst_sum, quadrature_norm(g - (d.f_eps + d.u_eps - d.v_eps)) / scale);
            }
        }
    };
    direct_sums(make_halfline_model());
    direct_sums(make_twohalflines_model());
    report.add(check_le("direct-sum residuals", worst_sum, cfg.decomposition_tol,
                        "||g - (f_eps + u_eps - v_eps)||, ||g - (f + S_D^-1 u_1 + u_0)|| <= 1e-9 ||g||"));

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.details = {{"seconds", seconds}};
    return report;
}

}  // namespace extlab::experiments
