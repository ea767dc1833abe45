// extlab: convergence sweeps and worked examples for self-adjoint extension
// labels of -d^2/dx^2 + 1 on one or two half-lines.
//
// Exit codes: 0 all checks pass, 2 configuration error, 3 a numerical check failed.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "extlab/errors.hpp"
#include "extlab/experiments/examples.hpp"
#include "extlab/experiments/report.hpp"
#include "extlab/experiments/selftest.hpp"
#include "extlab/experiments/sweep.hpp"

namespace {

namespace ex = extlab::experiments;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;

int finish(const ex::CheckReport& report, bool json) {
    if (json) {
        std::cout << ex::to_json(report).dump(2) << "\n";
    } else {
        ex::print_text(std::cout, report);
    }
    return report.passed() ? kExitOk : kExitFailure;
}

std::vector<double> parse_alphas(const std::string& s) {
    std::vector<double> out;
    for (auto part : ex::detail::split(s, ',')) out.push_back(ex::detail::parse_double(part, "alpha"));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on self-adjoint extension labels"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "Print the machine-readable summary on stdout");

    std::string config_path;
    std::string model;
    std::string extension;
    std::string eps;
    std::size_t probes = 0;
    std::uint64_t seed = 0;
    std::string out;
    auto* sweep = app.add_subcommand("sweep", "Convergence sweep of the boundary maps over an eps grid");
    sweep->add_option("--config", config_path, "JSON config file; command-line flags override its values");
    sweep->add_option("--model", model, "halfline | twohalflines");
    sweep->add_option("--extension", extension, "friedrichs | adjoint | salpha:<alpha>");
    sweep->add_option("--eps", eps, "start:stop:count, geometric (default 1e-1:1e-4:7)");
    sweep->add_option("--probes", probes, "Number of probe elements (default 5)");
    sweep->add_option("--seed", seed, "Probe generator seed (default 7)");
    sweep->add_option("--out", out, "CSV output path; the JSON summary goes next to it as <out>.json");

    std::string alphas = "-2,-1,0,1,3";
    auto* ex1 = app.add_subcommand("example1", "Friedrichs extension on the half-line");
    auto* ex2 = app.add_subcommand("example2", "Point interactions S_alpha on two half-lines");
    ex2->add_option("--alpha", alphas, "Comma-separated alpha values");
    auto* self = app.add_subcommand("selftest", "Oracle checks of the closed-form machinery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sweep) {
            ex::SweepConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw extlab::ConfigError("cannot open config file '" + config_path + "'");
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw extlab::ConfigError(std::string("config file is not valid JSON: ") + e.what());
                }
                ex::apply_config_json(cfg, j);
            }
            if (sweep->count("--model")) cfg.model = model;
            if (sweep->count("--extension")) cfg.extension = ex::parse_extension(extension);
            if (sweep->count("--eps")) cfg.eps = ex::parse_eps_grid(eps);
            if (sweep->count("--probes")) cfg.probes = probes;
            if (sweep->count("--seed")) cfg.seed = seed;
            if (sweep->count("--out")) cfg.out = out;
            cfg.validate();

            const ex::SweepReport report = ex::cmd_sweep(cfg);
            const auto summary = ex::summary_json(report);
            if (!cfg.out.empty()) {
                std::ofstream csv(cfg.out);
                if (!csv) throw extlab::ConfigError("cannot write '" + cfg.out + "'");
                ex::write_csv(csv, report.rows, ex::slope_windows(report), cfg.noise_floor);
                std::ofstream js(cfg.out + ".json");
                js << summary.dump(2) << "\n";
            }
            if (json) {
                std::cout << summary.dump(2) << "\n";
            } else {
                std::cout << "sweep " << cfg.model << "/" << cfg.extension.str() << ": " << report.rows.size()
                          << " rows, " << report.checks.checks.size() << " checks, " << report.checks.failures()
                          << " failed\n";
                for (const auto& s : report.slopes) {
                    std::cout << "  slope " << s.quantity_id << " = "
                              << (s.fit.fitted() ? ex::format_double(s.fit.slope) : "n/a (below noise floor)")
                              << (s.passed ? "" : "  FAIL") << "\n";
                }
                for (const auto& c : report.checks.checks)
                    if (!c.passed) std::cout << "  FAIL " << c.name << " [" << c.relation << "]\n";
                std::cout << (report.passed() ? "PASS" : "FAIL") << "\n";
            }
            return report.passed() ? kExitOk : kExitFailure;
        }
        if (*ex1) return finish(ex::cmd_example1(), json);
        if (*ex2) {
            ex::Example2Config cfg;
            cfg.alphas = parse_alphas(alphas);
            return finish(ex::cmd_example2(cfg), json);
        }
        if (*self) return finish(ex::cmd_selftest(), json);
    } catch (const extlab::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const extlab::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}
