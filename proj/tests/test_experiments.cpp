#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "extlab/experiments/examples.hpp"
#include "extlab/experiments/report.hpp"
#include "extlab/experiments/selftest.hpp"
#include "extlab/experiments/sweep.hpp"

using namespace extlab;
using namespace extlab::experiments;

TEST_CASE("fit_loglog recovers exact power laws", "[report]") {
    const std::vector<double> eps = EpsGrid{1e-1, 1e-4, 7}.values();
    for (double p : {0.5, 1.0, 2.0}) {
        std::vector<double> v;
        for (double e : eps) v.push_back(3.0 * std::pow(e, p));
        const SlopeFit f = fit_loglog(eps, v);
        CHECK(f.points == eps.size());
        CHECK(f.slope == Catch::Approx(p).epsilon(1e-12));
        CHECK(std::exp(f.intercept) == Catch::Approx(3.0).epsilon(1e-10));
        CHECK(f.half_width <= 1e-10);
        CHECK(slope_within(f, p, 1e-9));
    }
}

TEST_CASE("fit_loglog: hand-computed OLS with scatter", "[report]") {
    // log-log points (0, 0), (1, 1), (2, 3): slope 1.5
    const std::vector<double> eps{1.0, std::exp(1.0), std::exp(2.0)};
    const std::vector<double> v{1.0, std::exp(1.0), std::exp(3.0)};
    const SlopeFit f = fit_loglog(eps, v, 1e-300);
    CHECK(f.slope == Catch::Approx(1.5).epsilon(1e-12));
    CHECK(f.intercept == Catch::Approx(-1.0 / 6.0).epsilon(1e-12));
    CHECK(f.half_width > 0.0);
}

TEST_CASE("fit_loglog drops values under the noise floor", "[report]") {
    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const SlopeFit none = fit_loglog(eps, {1e-13, 1e-14, 0.0});
    CHECK_FALSE(none.fitted());
    CHECK(none.below_floor);
    CHECK_FALSE(slope_within(none, 1.0));
    const SlopeFit two = fit_loglog(eps, {1e-1, 1e-2, 1e-14});
    CHECK(two.points == 2);
    CHECK(two.slope == Catch::Approx(1.0));
    CHECK(order_at_least_one(two, 0.1));
}

TEST_CASE("eps grid parsing", "[sweep]") {
    const EpsGrid g = parse_eps_grid("1e-1:1e-4:7");
    const auto v = g.values();
    REQUIRE(v.size() == 7);
    CHECK(v.front() == 1e-1);
    CHECK(v.back() == 1e-4);
    CHECK(v[2] == Catch::Approx(1e-2).epsilon(1e-12));
    CHECK_THROWS_AS(parse_eps_grid("1e-1:1e-4"), ConfigError);
    CHECK_THROWS_AS(parse_eps_grid("x:1e-4:3"), ConfigError);
    CHECK_THROWS_AS(parse_eps_grid("1e-1:1e-4:2.5"), ConfigError);
    CHECK_THROWS_AS(parse_eps_grid("1e-1:1e-4:0"), ConfigError);
}

TEST_CASE("extension and config validation", "[sweep]") {
    CHECK(parse_extension("friedrichs").kind == ExtensionSpec::Kind::Friedrichs);
    CHECK(parse_extension("salpha:-2.5").alpha == -2.5);
    CHECK(parse_extension("salpha:1").str() == "salpha:1");
    CHECK_THROWS_AS(parse_extension("dirichlet"), ConfigError);
    CHECK_THROWS_AS(parse_extension("salpha:"), ConfigError);

    SweepConfig c;
    CHECK_NOTHROW(c.validate());
    c.extension = parse_extension("salpha:1");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.model = "twohalflines";
    CHECK_NOTHROW(c.validate());
    c.eps = parse_eps_grid("1:1e-4:5");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps = parse_eps_grid("1e-4:1e-1:5");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.eps = EpsGrid{};
    c.probes = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.model = "circle";
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("JSON config", "[sweep]") {
    SweepConfig c;
    apply_config_json(c, nlohmann::json::parse(R"({
        "model": "twohalflines", "extension": "friedrichs",
        "eps": {"start": 0.1, "stop": 0.001, "count": 3},
        "probes": 2, "seed": 9, "tolerances": {"slope_band": 0.2}
    })"));
    CHECK(c.model == "twohalflines");
    CHECK(c.eps.count == 3);
    CHECK(c.probes == 2);
    CHECK(c.seed == 9);
    CHECK(c.slope_band == 0.2);
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"colour": 1})")), ConfigError);
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"probes": "many"})")), ConfigError);
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse(R"({"tolerances": {"x": 1}})")), ConfigError);
    CHECK_THROWS_AS(apply_config_json(c, nlohmann::json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("CSV output", "[report]") {
    std::ostringstream os;
    const std::vector<SweepRow> rows{{0.1, "upsilon/p0", 0.5, 1.0}, {0.01, "gamma0_eps/p0", 1e-14, 2.0}};
    write_csv(os, rows, {{"upsilon/p0", {0.1, 0.01}}, {"gamma0_eps/p0", {0.1, 0.01}}});
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "eps,quantity_id,value,bound,slope_window");
    std::getline(in, line);
    CHECK(line == "0.10000000000000001,upsilon/p0,0.5,1,0.10000000000000001:0.01");
    std::getline(in, line);
    CHECK(line.ends_with(",excluded"));
    CHECK(format_double(NAN).empty());
}

TEST_CASE("check reports", "[report]") {
    CheckReport r;
    r.add(check_le("a", 1.0, 2.0, "a <= 2"));
    CHECK(r.passed());
    r.add(check_true("b", false, "b"));
    CHECK_FALSE(r.passed());
    CHECK(r.failures() == 1);
    const auto j = to_json(r);
    CHECK(j["passed"] == false);
    CHECK(j["checks"].size() == 2);
    CHECK(j["checks"][1]["measured"].is_null());
}

TEST_CASE("small sweep on the half-line", "[sweep]") {
    SweepConfig c;
    c.extension = parse_extension("friedrichs");
    c.eps = parse_eps_grid("1e-1:1e-3:3");
    c.probes = 2;
    const SweepReport r = cmd_sweep(c);
    CHECK(r.passed());
    CHECK(r.eps.size() == 3);
    CHECK_FALSE(r.rows.empty());
    for (const auto& row : r.rows) {
        if (std::isfinite(row.bound)) CHECK(row.value <= row.bound);
    }
    const auto s = summary_json(r);
    CHECK(s["schema_version"] == kSchemaVersion);
}

TEST_CASE("Example 1 coefficient against a quadrature oracle", "[examples]") {
    // for g in D(S_F), c_eps = <e_eps, (S* + i eps) g> / (2 i eps) with e_eps the unit
    // vector of ker(S* - i eps); evaluate that inner product by quadrature
    const auto model = make_halfline_model();
    const auto ext = make_friedrichs_extension(model);
    for (const auto& g : sample_domain(ext, 3, 5)) {
        const Complex c = 2.0 * boundary_values(g.channel(0)).derivative;
        for (double eps : {0.3, 1e-2}) {
            const ExpPoly e = model.deficiency_basis(Complex(0.0, eps))[0].channel(0);
            const ExpPoly rhs = apply_shifted(g.channel(0), Complex(0.0, -eps));
            const Complex q = oracle::quadrature_inner_product(e, rhs).value / Complex(0.0, 2.0 * eps);
            CHECK(std::abs(example1_coefficient(c, eps) - q) <= 1e-9 * std::abs(q));
        }
    }
}

TEST_CASE("Example 2 directions", "[examples]") {
    const auto ext = make_salpha_extension(0.0);
    const auto d = example2_domain_direction();
    const auto c = example2_complement_direction();
    CHECK(std::abs(inner_product(d, c)) <= 1e-15);
    // continuous across the origin
    const TraceVector t = ext.model().boundary_trace(d);
    CHECK(t[0] == t[2]);
}

TEST_CASE("selftest subcommand passes with a reduced case count", "[selftest]") {
    SelftestConfig cfg;
    cfg.quadrature_pairs = 20;
    cfg.resolvent_cases = 20;
    const CheckReport r = cmd_selftest(cfg);
    for (const auto& c : r.checks) {
        INFO(c.name << " measured " << c.measured);
        CHECK(c.passed);
    }
}
