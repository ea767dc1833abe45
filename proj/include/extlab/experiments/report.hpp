#pragma once

// Report plumbing shared by the sweep and the worked examples: log-log slope
// fits, check verdicts, CSV rows and the JSON summary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <locale>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

namespace extlab::experiments {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kNoiseFloor = 1e-11;
inline constexpr double kSlopeBand = 0.1;

// ---------------------------------------------------------------------------
// Slope fits

struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double half_width = std::numeric_limits<double>::quiet_NaN();  // 95% t-interval
    std::size_t points = 0;
    bool below_floor = false;  // every value under the noise floor, nothing to fit

    bool fitted() const { return points >= 2; }
};

/// Ordinary least squares of log(value) on log(eps). Points with a value
/// below `noise_floor` are dropped. Fewer than two remaining points leave the
/// fit empty.
inline SlopeFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& values,
                           double noise_floor = kNoiseFloor) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < std::min(eps.size(), values.size()); ++i) {
        if (!(values[i] >= noise_floor) || !(eps[i] > 0.0)) continue;
        xs.push_back(std::log(eps[i]));
        ys.push_back(std::log(values[i]));
    }
    SlopeFit fit;
    fit.points = xs.size();
    fit.below_floor = xs.empty() && !values.empty();
    if (xs.size() < 2) return fit;

    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) {
        fit.points = 0;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (xs.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            rss += r * r;
        }
        const double dof = n - 2.0;
        const double se = std::sqrt(rss / dof / sxx);
        boost::math::students_t dist(dof);
        fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
    }
    return fit;
}

inline bool slope_within(const SlopeFit& f, double target, double band = kSlopeBand) {
    return f.fitted() && std::abs(f.slope - target) <= band;
}

// ---------------------------------------------------------------------------
// Checks

/// One verdict. `relation` spells out the inequality or identity tested.
struct Check {
    std::string name;
    bool passed = false;
    std::string relation;
    double measured = std::numeric_limits<double>::quiet_NaN();
    double limit = std::numeric_limits<double>::quiet_NaN();
};

inline Check check_le(std::string name, double measured, double limit, std::string relation) {
    return {std::move(name), measured <= limit, std::move(relation), measured, limit};
}

inline Check check_true(std::string name, bool ok, std::string relation) {
    return {std::move(name), ok, std::move(relation), std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN()};
}

struct CheckReport {
    std::string title;
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
    }
    void add(Check c) { checks.push_back(std::move(c)); }
};

inline nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const Check& c) {
    return {{"name", c.name},
            {"passed", c.passed},
            {"relation", c.relation},
            {"measured", number_or_null(c.measured)},
            {"limit", number_or_null(c.limit)}};
}

inline nlohmann::json to_json(const SlopeFit& f) {
    return {{"slope", number_or_null(f.slope)},
            {"half_width", number_or_null(f.half_width)},
            {"points", f.points},
            {"below_noise_floor", f.below_floor}};
}

inline nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"schema_version", kSchemaVersion},
            {"report", r.title},
            {"passed", r.passed()},
            {"failures", r.failures()},
            {"checks", checks},
            {"details", r.details}};
}

inline void print_text(std::ostream& os, const CheckReport& r) {
    os << r.title << "\n";
    for (const auto& c : r.checks) {
        os << (c.passed ? "  ok    " : "  FAIL  ") << c.name << "  [" << c.relation << "]";
        if (std::isfinite(c.measured)) os << "  measured=" << c.measured;
        if (std::isfinite(c.limit)) os << "  limit=" << c.limit;
        os << "\n";
    }
    os << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks.size() - r.failures() << "/" << r.checks.size()
       << " checks)\n";
}

// ---------------------------------------------------------------------------
// CSV

/// One measured quantity at one eps. `bound` is NaN when the quantity has no
/// bound of its own.
struct SweepRow {
    double eps = 0.0;
    std::string quantity_id;
    double value = 0.0;
    double bound = std::numeric_limits<double>::quiet_NaN();
};

inline const char* kCsvHeader = "eps,quantity_id,value,bound,slope_window";

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

/// Rows in the order given. slope_window is "<eps_max>:<eps_min>" of the fit
/// the row took part in, or "excluded" when it fell under the noise floor or
/// its quantity is not fitted.
inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                      const std::map<std::string, std::pair<double, double>>& windows,
                      double noise_floor = kNoiseFloor) {
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        std::string window = "excluded";
        if (const auto it = windows.find(r.quantity_id); it != windows.end() && r.value >= noise_floor) {
            window = format_double(it->second.first) + ":" + format_double(it->second.second);
        }
        os << format_double(r.eps) << "," << r.quantity_id << "," << format_double(r.value) << ","
           << format_double(r.bound) << "," << window << "\n";
    }
}

}  // namespace extlab::experiments
