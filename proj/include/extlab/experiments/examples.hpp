#pragma once

// The two worked examples: the Friedrichs extension on the half-line, and the
// point-interaction family S_alpha on two half-lines.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "extlab/calculus.hpp"
#include "extlab/experiments/report.hpp"
#include "extlab/experiments/sweep.hpp"
#include "extlab/models.hpp"
#include "extlab/quadrature.hpp"

namespace extlab::experiments {

struct Example1Config {
    EpsGrid eps;
    std::size_t probes = 5;
    std::uint64_t seed = 7;
    double slope_band = kSlopeBand;
    double noise_floor = kNoiseFloor;
};

/// Closed-form coefficient of u_eps^(g) on sqrt(2) kappa_eps e^{-x sqrt(1 - i eps)}
/// for g in D(S_F) with c = 2 g'(0).
inline Complex example1_coefficient(Complex c, double eps) {
    const Complex ie(0.0, eps);
    const Complex sum = std::sqrt(1.0 + ie) + std::sqrt(1.0 - ie);
    return c * sum / (std::pow(2.0, 2.5) * ie * kappa(eps));
}

inline CheckReport cmd_example1(const Example1Config& cfg = {}) {
    const auto model = make_halfline_model();
    const auto ext = make_friedrichs_extension(model);
    const auto probes = sample_domain(ext, cfg.probes, cfg.seed);
    const auto grid = cfg.eps.values();

    CheckReport report;
    report.title = "example1 halfline/friedrichs";
    nlohmann::json rows = nlohmann::json::array();

    std::vector<std::vector<double>> l2(probes.size()), graph(probes.size()), eps_u(probes.size());
    for (double eps : grid) {
        const VnParameter vn = reconstruct_U(ext, Complex(0.0, eps), probes);
        report.add(check_le("theta @ eps=" + format_double(eps), std::abs(vn.matrix(0, 0) - 1.0), 1e-10,
                            "|e^{i theta_eps} - 1| <= 1e-10"));
        const auto basis = model.deficiency_basis(Complex(0.0, eps));
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const HilbertElement& g = probes[p];
            const Complex c = 2.0 * boundary_values(g.channel(0)).derivative;
            const VnComponents comp = vn_components(ext, g, eps);
            const Complex measured = coordinates(basis, comp.u_eps)[0];
            const Complex expected = example1_coefficient(c, eps);
            report.add(check_le("c_eps/p" + std::to_string(p) + " @ eps=" + format_double(eps),
                                std::abs(measured - expected) / std::abs(expected), 1e-9,
                                "|c_eps measured - closed form| / |closed form| <= 1e-9"));

            const HilbertElement f_limit =
                g - HilbertElement{ExpPoly::term(0.5 * c, 1, 1.0)};
            const HilbertElement diff = comp.f_eps - f_limit;
            const double d0 = quadrature_norm(diff);
            const double d1 = quadrature_norm(model.apply_adjoint(diff));
            l2[p].push_back(d0);
            graph[p].push_back(std::hypot(d0, d1));
            eps_u[p].push_back(eps * norm(comp.u_eps));
            rows.push_back({{"eps", eps}, {"probe", p}, {"c_eps_re", measured.real()}, {"c_eps_im", measured.imag()},
                            {"f_eps_l2_error", d0}, {"f_eps_graph_error", graph[p].back()},
                            {"eps_u_norm", eps_u[p].back()}});
        }
    }

    nlohmann::json slopes = nlohmann::json::array();
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const std::string tag = "/p" + std::to_string(p);
        const SlopeFit fl2 = fit_loglog(grid, l2[p], cfg.noise_floor);
        const SlopeFit fgr = fit_loglog(grid, graph[p], cfg.noise_floor);
        report.add(check_true("f_eps -> f order L2" + tag, order_at_least_one(fl2, cfg.slope_band),
                              "log-log slope of ||f_eps - f|| >= 1 - " + format_double(cfg.slope_band)));
        report.checks.back().measured = fl2.slope;
        report.add(check_true("f_eps -> f order graph" + tag, order_at_least_one(fgr, cfg.slope_band),
                              "log-log slope of the graph-norm error >= 1 - " + format_double(cfg.slope_band)));
        report.checks.back().measured = fgr.slope;
        slopes.push_back({{"probe", p}, {"l2", to_json(fl2)}, {"graph", to_json(fgr)}});

        // bracket around the eps -> 0 value |c| / (2 sqrt 2) over the last two decades
        const Complex c = 2.0 * boundary_values(probes[p].channel(0)).derivative;
        const double limit = std::abs(c) / (2.0 * std::sqrt(2.0));
        double lo = INFINITY;
        double hi = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] > 1e-2 * (1.0 + 1e-12)) continue;
            lo = std::min(lo, eps_u[p][i]);
            hi = std::max(hi, eps_u[p][i]);
        }
        report.add(check_true("eps ||u_eps|| bracket" + tag, lo >= 0.5 * limit && hi <= 2.0 * limit && limit > 0.0,
                              "eps ||u_eps|| in [|c|/(4 sqrt 2), |c|/sqrt 2] for eps in [1e-4, 1e-2]"));
        report.checks.back().measured = hi / lo;
    }
    report.details = {{"rows", rows}, {"slopes", slopes}};
    return report;
}

struct Example2Config {
    std::vector<double> alphas{-2.0, -1.0, 0.0, 1.0, 3.0};
    std::vector<double> eps_grid{4e-4, 2e-4, 1e-4};
    std::size_t probes = 4;
    std::uint64_t seed = 7;
    double tolerance = 1e-6;
};

/// e^{x} (+) e^{-x} and -e^{x} (+) e^{-x}, with the left channel stored reflected.
inline HilbertElement example2_domain_direction() {
    return HilbertElement{ExpPoly::exp(1.0), ExpPoly::exp(1.0)};
}
inline HilbertElement example2_complement_direction() {
    return HilbertElement{-ExpPoly::exp(1.0), ExpPoly::exp(1.0)};
}

inline CheckReport cmd_example2(const Example2Config& cfg = {}) {
    CheckReport report;
    report.title = "example2 twohalflines/salpha";
    const double tol = cfg.tolerance;
    nlohmann::json per_alpha = nlohmann::json::array();
    for (double alpha : cfg.alphas) {
        const std::string tag = " alpha=" + format_double(alpha);
        const auto ext = make_salpha_extension(alpha);
        const auto probes = sample_domain(ext, cfg.probes, cfg.seed);
        const KvbReconstruction rec = reconstruct_T(ext, probes, cfg.eps_grid);
        const KvbReconstruction direct = kvb_parameter_direct(ext, probes);
        const KvbParameter& kvb = rec.parameter;

        const std::size_t rank = kvb.domain_basis.size();
        report.add(check_true("rank" + tag, rank == 1, "dim D(T) = 1"));
        if (rank != 1) continue;
        const double dgap = subspace_gap(kvb.domain_basis, {example2_domain_direction()}).delta_hat;
        const double cgap = subspace_gap(kvb.complement_basis, {example2_complement_direction()}).delta_hat;
        const double eig = kvb.t_matrix(0, 0).real();
        report.add(check_le("domain" + tag, dgap, tol, "gap(D(T), span{e^x (+) e^-x}) < 1e-6"));
        report.add(check_le("eigenvalue" + tag, std::abs(eig - (2.0 + alpha)), tol, "|T - (2 + alpha)| <= 1e-6"));
        report.add(check_le("complement" + tag, cgap, tol, "gap(complement, span{-e^x (+) e^-x}) < 1e-6"));
        const double route_gap = (kernel_operator(ext.model(), kvb).op - kernel_operator(ext.model(), direct.parameter).op).max_abs();
        report.add(check_le("limit route vs direct route" + tag, route_gap, tol,
                            "max |T_limit - T_direct| (kernel coordinates) <= 1e-6"));

        double form_error = 0.0;
        for (const auto& g : probes) {
            const KvbComponents c = kvb_components(ext, g);
            const Complex g0 = boundary_values(g.channel(1)).value;
            const double uu = inner_product(c.u, c.u).real();
            const Complex utu = inner_product(c.u, c.t_u_plus_w);
            form_error = std::max({form_error, std::abs(uu - std::norm(g0)),
                                   std::abs(utu - (2.0 + alpha) * std::norm(g0))});
        }
        report.add(check_le("quadratic forms" + tag, form_error, 1e-9,
                            "<u,u> = |g0|^2 and <u,Tu> = (2 + alpha)|g0|^2 to 1e-9"));
        per_alpha.push_back({{"alpha", alpha},
                             {"eigenvalue", eig},
                             {"domain_gap", dgap},
                             {"complement_gap", cgap},
                             {"extrapolation_error", rec.extrapolation_error},
                             {"asymmetry", rec.asymmetry}});
    }
    report.details = {{"alphas", per_alpha}};
    return report;
}

}  // namespace extlab::experiments
