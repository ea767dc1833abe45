#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "extlab/calculus.hpp"
#include "extlab/errors.hpp"
#include "extlab/experiments/report.hpp"
#include "extlab/models.hpp"
#include "extlab/quadrature.hpp"

namespace extlab::experiments {

/// Geometric grid start, ..., stop with `count` points, strictly decreasing.
struct EpsGrid {
    double start = 1e-1;
    double stop = 1e-4;
    std::size_t count = 7;

    std::vector<double> values() const {
        std::vector<double> v;
        if (count == 1) return {start};
        const double ratio = std::pow(stop / start, 1.0 / static_cast<double>(count - 1));
        for (std::size_t i = 0; i < count; ++i) v.push_back(i + 1 == count ? stop : start * std::pow(ratio, double(i)));
        return v;
    }
};

namespace detail {
inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("cannot read " + std::string(what) + " from '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}
}  // namespace detail

/// "start:stop:count", e.g. "1e-1:1e-4:7".
inline EpsGrid parse_eps_grid(std::string_view spec) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 3) throw ConfigError("eps grid must be start:stop:count, got '" + std::string(spec) + "'");
    EpsGrid g;
    g.start = detail::parse_double(parts[0], "eps start");
    g.stop = detail::parse_double(parts[1], "eps stop");
    const double count = detail::parse_double(parts[2], "eps count");
    if (!(count >= 1.0) || count != std::floor(count) || count > 1000.0) {
        throw ConfigError("eps count must be a positive integer");
    }
    g.count = static_cast<std::size_t>(count);
    return g;
}

/// "friedrichs", "adjoint" (no boundary condition, probes from all of D(S*))
/// or "salpha:<alpha>" (two half-lines only).
struct ExtensionSpec {
    enum class Kind { Adjoint, Friedrichs, SAlpha } kind = Kind::Adjoint;
    double alpha = 0.0;

    std::string str() const {
        switch (kind) {
            case Kind::Adjoint: return "adjoint";
            case Kind::Friedrichs: return "friedrichs";
            case Kind::SAlpha: return "salpha:" + format_double(alpha);
        }
        return {};
    }
};

inline ExtensionSpec parse_extension(std::string_view s) {
    if (s == "adjoint") return {ExtensionSpec::Kind::Adjoint, 0.0};
    if (s == "friedrichs") return {ExtensionSpec::Kind::Friedrichs, 0.0};
    if (s.starts_with("salpha:")) return {ExtensionSpec::Kind::SAlpha, detail::parse_double(s.substr(7), "alpha")};
    throw ConfigError("unknown extension '" + std::string(s) + "' (friedrichs, adjoint, salpha:<alpha>)");
}

struct SweepConfig {
    std::string model = "halfline";
    ExtensionSpec extension;
    EpsGrid eps;
    std::size_t probes = 5;
    std::uint64_t seed = 7;
    std::string out;  // CSV path; empty writes nothing
    double slope_band = kSlopeBand;
    double noise_floor = kNoiseFloor;
    double identity_tol = 1e-9;

    void validate() const {
        if (model != "halfline" && model != "twohalflines") {
            throw ConfigError("unknown model '" + model + "' (halfline, twohalflines)");
        }
        if (extension.kind == ExtensionSpec::Kind::SAlpha && model != "twohalflines") {
            throw ConfigError("salpha extensions live on the twohalflines model");
        }
        if (eps.count == 0) throw ConfigError("eps grid is empty");
        const auto v = eps.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] >= kEpsMin && v[i] <= kEpsMax)) throw ConfigError("eps values must lie in [1e-5, 0.5]");
            if (i > 0 && !(v[i] < v[i - 1])) throw ConfigError("eps grid must be strictly decreasing");
        }
        if (probes == 0) throw ConfigError("need at least one probe");
        if (!(slope_band > 0.0) || !(noise_floor > 0.0) || !(identity_tol > 0.0)) {
            throw ConfigError("tolerances must be positive");
        }
    }
};

/// Keys: model, extension, eps ("start:stop:count" or {start, stop, count}),
/// probes, seed, out, tolerances {slope_band, noise_floor, identity_tol}.
/// Unknown keys are rejected.
inline void apply_config_json(SweepConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "model") {
                c.model = value.get<std::string>();
            } else if (key == "extension") {
                c.extension = parse_extension(value.get<std::string>());
            } else if (key == "eps") {
                if (value.is_string()) {
                    c.eps = parse_eps_grid(value.get<std::string>());
                } else {
                    c.eps.start = value.at("start").get<double>();
                    c.eps.stop = value.at("stop").get<double>();
                    c.eps.count = value.at("count").get<std::size_t>();
                }
            } else if (key == "probes") {
                c.probes = value.get<std::size_t>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "out") {
                c.out = value.get<std::string>();
            } else if (key == "tolerances") {
                for (const auto& [tk, tv] : value.items()) {
                    if (tk == "slope_band") c.slope_band = tv.get<double>();
                    else if (tk == "noise_floor") c.noise_floor = tv.get<double>();
                    else if (tk == "identity_tol") c.identity_tol = tv.get<double>();
                    else throw ConfigError("unknown tolerance '" + tk + "'");
                }
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Measured quantities

/// Identifiers of the quantities measured per probe and eps. The first seven
/// are the pre-triplet differences from their eps = 0 limits.
namespace quantity {
inline constexpr const char* kProjGapMinus = "proj_gap_minus";
inline constexpr const char* kProjGapPlus = "proj_gap_plus";
inline constexpr const char* kGamma0Eps = "gamma0_eps";
inline constexpr const char* kFGraph = "f_eps_graph";
inline constexpr const char* kUpsilonIdentity = "adjoint_upsilon_identity";
inline constexpr const char* kVnResidual = "vn_residual";
inline constexpr const char* kKvbResidual = "kvb_residual";
inline constexpr const char* kEpsUNorm = "eps_u_norm";
}  // namespace quantity

struct QuantityInfo {
    std::string id;
    bool fitted = true;    // enters the slope checks
    std::string relation;  // the inequality its bound column encodes
};

inline std::vector<QuantityInfo> probe_quantities() {
    return {
        {"gamma0_of_upsilon", true, "||Gamma_0 Upsilon_eps g - Gamma_0 g|| <= 2 eps C"},
        {"gamma1_minus", true, "||Gamma_1,eps^- g - Gamma_1 g|| <= eps C"},
        {"gamma1_plus", true, "||Gamma_1,eps^+ g - Gamma_1 g|| <= eps C"},
        {"upsilon", true, "||Upsilon_eps g - (S_D^-1 u_1 + u_0)|| <= eps C"},
        {"adjoint_upsilon", true, "||S* Upsilon_eps g - u_1|| <= eps C"},
        {"f_eps", true, "||f_eps - f|| <= eps C"},
        {"closure_f_eps", true, "||S f_eps - S f|| <= eps C"},
        {quantity::kFGraph, true, "(||f_eps - f||^2 + ||S (f_eps - f)||^2)^(1/2) <= sqrt(2) eps C"},
        {quantity::kUpsilonIdentity, false, "||S* Upsilon_eps g - (Gamma_1,eps^- + Gamma_1,eps^+) g / 2|| <= tol C"},
        {quantity::kVnResidual, false, "||g - (f_eps + u_eps - v_eps)|| <= tol C"},
        {quantity::kKvbResidual, false, "||g - (f + S_D^-1 u_1 + u_0)|| <= tol C"},
        {quantity::kEpsUNorm, false, "eps ||u_eps|| (no bound, bracket only)"},
    };
}

/// C = ||g|| + ||closure^{-1}|| ||S* g||.
template <SymmetricModel M>
double bound_constant(const M& model, const HilbertElement& g) {
    return norm(g) + model.closure_inverse_bound() * norm(model.apply_adjoint(g));
}

/// Values of probe_quantities() in order, and their bounds (NaN: none).
struct ProbeMeasurement {
    std::vector<double> values;
    std::vector<double> bounds;
};

template <SymmetricModel M>
ProbeMeasurement measure_probe(const M& model, const HilbertElement& g, double eps, double identity_tol) {
    const double c = bound_constant(model, g);
    const PretripletTerms terms = pretriplet_terms(model, g, eps);
    const PretripletTerms limits = canonical_limits(model, g);
    ProbeMeasurement m;
    for (std::size_t k = 0; k < terms.size(); ++k) m.values.push_back(quadrature_norm(terms[k] - limits[k]));
    const double bound_factor[7] = {2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    for (double f : bound_factor) m.bounds.push_back(f * eps * c);

    // graph norm of f_eps - f
    m.values.push_back(std::hypot(m.values[5], m.values[6]));
    m.bounds.push_back(std::sqrt(2.0) * eps * c);

    const HilbertElement half_sum = Complex(0.5) * (terms[1] + terms[2]);
    m.values.push_back(quadrature_norm(terms[4] - half_sum));
    m.bounds.push_back(identity_tol * std::max(1.0, c));

    const VnDecomposition vn = decompose_vn(model, g, eps);
    m.values.push_back(quadrature_norm(g - (vn.f_eps + vn.u_eps - vn.v_eps)));
    m.bounds.push_back(identity_tol * std::max(1.0, c));

    const KvbDecomposition kvb = decompose_kvb(model, g);
    m.values.push_back(quadrature_norm(g - (kvb.f + model.distinguished_resolvent(kvb.u1) + kvb.u0)));
    m.bounds.push_back(identity_tol * std::max(1.0, c));

    m.values.push_back(eps * norm(vn.u_eps));
    m.bounds.push_back(std::numeric_limits<double>::quiet_NaN());
    return m;
}

// ---------------------------------------------------------------------------
// Sweep

struct SlopeEntry {
    std::string quantity_id;
    SlopeFit fit;
    bool passed = false;
};

struct SweepReport {
    SweepConfig config;
    std::vector<double> eps;
    std::vector<SweepRow> rows;
    std::vector<SlopeEntry> slopes;
    CheckReport checks;

    bool passed() const { return checks.passed(); }
};

/// First-order-or-better: slope >= 1 - band. The measured rate of several
/// quantities is 2, and an O(eps) statement is an upper bound on the error.
inline bool order_at_least_one(const SlopeFit& f, double band) { return f.fitted() && f.slope >= 1.0 - band; }

template <SymmetricModel M>
SweepReport run_sweep(const M& model, const std::vector<HilbertElement>& probes, const SweepConfig& config) {
    config.validate();
    SweepReport report;
    report.config = config;
    report.eps = config.eps.values();
    report.checks.title = "sweep " + config.model + "/" + config.extension.str();

    const auto infos = probe_quantities();
    struct EpsResult {
        double gap_minus = 0.0;
        double gap_plus = 0.0;
        std::vector<ProbeMeasurement> per_probe;
    };
    std::vector<std::future<EpsResult>> futures;
    for (double eps : report.eps) {
        futures.push_back(std::async(std::launch::async, [&model, &probes, &config, eps] {
            EpsResult r;
            r.gap_minus = projection_gap_norm(model, eps, Side::Minus);
            r.gap_plus = projection_gap_norm(model, eps, Side::Plus);
            for (const auto& g : probes) r.per_probe.push_back(measure_probe(model, g, eps, config.identity_tol));
            return r;
        }));
    }
    std::vector<EpsResult> results;
    for (auto& f : futures) results.push_back(f.get());

    // series per quantity id, in grid order
    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> fitted_ids;
    auto add_row = [&](double eps, const std::string& id, double value, double bound, const std::string& relation,
                       bool fitted) {
        report.rows.push_back({eps, id, value, bound});
        if (series[id].empty() && fitted) fitted_ids.push_back(id);
        series[id].push_back(value);
        if (std::isfinite(bound)) {
            report.checks.add(check_le(id + " @ eps=" + format_double(eps), value, bound, relation));
        }
    };

    for (std::size_t i = 0; i < report.eps.size(); ++i) {
        const double eps = report.eps[i];
        const double gap_bound = eps * model.closure_inverse_bound();
        add_row(eps, quantity::kProjGapMinus, results[i].gap_minus, gap_bound,
                "||P_ker(S*-i eps) - P_ker S*|| <= eps ||closure^-1||", true);
        add_row(eps, quantity::kProjGapPlus, results[i].gap_plus, gap_bound,
                "||P_ker(S*+i eps) - P_ker S*|| <= eps ||closure^-1||", true);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const auto& m = results[i].per_probe[p];
            for (std::size_t q = 0; q < infos.size(); ++q) {
                add_row(eps, infos[q].id + "/p" + std::to_string(p), m.values[q], m.bounds[q], infos[q].relation,
                        infos[q].fitted);
            }
        }
    }

    std::map<std::string, std::pair<double, double>> windows;
    for (const auto& id : fitted_ids) {
        SlopeEntry e{id, fit_loglog(report.eps, series[id], config.noise_floor), false};
        // A series entirely under the noise floor is an identically vanishing error.
        e.passed = e.fit.below_floor || order_at_least_one(e.fit, config.slope_band);
        std::vector<double> used;
        for (std::size_t i = 0; i < report.eps.size(); ++i)
            if (series[id][i] >= config.noise_floor) used.push_back(report.eps[i]);
        if (used.size() >= 2) windows[id] = {used.front(), used.back()};
        report.checks.add(check_true("slope " + id, e.passed,
                                     "log-log slope >= 1 - " + format_double(config.slope_band) +
                                         " (or all values below the noise floor)"));
        report.checks.checks.back().measured = e.fit.slope;
        report.slopes.push_back(std::move(e));
    }

    // eps ||u_eps|| stays in [L/2, 2L] with L its value at the smallest eps.
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto& s = series[std::string(quantity::kEpsUNorm) + "/p" + std::to_string(p)];
        const double ref = s.back();
        if (ref < config.noise_floor) continue;
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        report.checks.add(check_true("eps_u_norm bracket/p" + std::to_string(p), *lo >= 0.5 * ref && *hi <= 2.0 * ref,
                                     "eps ||u_eps|| within [L/2, 2L], L at the smallest eps"));
    }
    report.checks.details = {{"windows", nlohmann::json::object()}};
    for (const auto& [id, w] : windows) report.checks.details["windows"][id] = {w.first, w.second};
    return report;
}

/// JSON summary: config echo, slopes with confidence half-widths, every
/// check verdict and the overall pass flag.
inline nlohmann::json summary_json(const SweepReport& r) {
    nlohmann::json slopes = nlohmann::json::array();
    for (const auto& s : r.slopes) {
        auto j = to_json(s.fit);
        j["quantity_id"] = s.quantity_id;
        j["passed"] = s.passed;
        slopes.push_back(j);
    }
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks.checks) checks.push_back(to_json(c));
    return {{"schema_version", kSchemaVersion},
            {"report", "sweep"},
            {"model", r.config.model},
            {"extension", r.config.extension.str()},
            {"eps", r.eps},
            {"probes", r.config.probes},
            {"seed", r.config.seed},
            {"slope_band", r.config.slope_band},
            {"noise_floor", r.config.noise_floor},
            {"rows", r.rows.size()},
            {"slopes", slopes},
            {"checks", checks},
            {"failures", r.checks.failures()},
            {"passed", r.passed()}};
}

inline std::map<std::string, std::pair<double, double>> slope_windows(const SweepReport& r) {
    std::map<std::string, std::pair<double, double>> w;
    if (r.checks.details.contains("windows")) {
        for (const auto& [id, v] : r.checks.details["windows"].items()) w[id] = {v[0].get<double>(), v[1].get<double>()};
    }
    return w;
}

// ---------------------------------------------------------------------------
// Dispatch on the configured model and extension

using AnyModel = std::variant<HalfLineModel, TwoHalfLinesModel>;

inline AnyModel make_model(const std::string& name) {
    if (name == "halfline") return make_halfline_model();
    if (name == "twohalflines") return make_twohalflines_model();
    throw ConfigError("unknown model '" + name + "'");
}

template <SymmetricModel M>
std::vector<HilbertElement> sweep_probes(const M& model, const SweepConfig& c) {
    switch (c.extension.kind) {
        case ExtensionSpec::Kind::Adjoint: return sample_adjoint_domain(model, c.probes, c.seed);
        case ExtensionSpec::Kind::Friedrichs: return sample_domain(make_friedrichs_extension(model), c.probes, c.seed);
        case ExtensionSpec::Kind::SAlpha:
            if constexpr (std::is_same_v<M, TwoHalfLinesModel>) {
                return sample_domain(make_salpha_extension(c.extension.alpha), c.probes, c.seed);
            }
            throw ConfigError("salpha extensions live on the twohalflines model");
    }
    return {};
}

inline SweepReport cmd_sweep(const SweepConfig& config) {
    config.validate();
    return std::visit([&](const auto& model) { return run_sweep(model, sweep_probes(model, config), config); },
                      make_model(config.model));
}

}  // namespace extlab::experiments
