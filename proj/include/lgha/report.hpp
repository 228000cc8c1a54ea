#pragma once

#include "field_io.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <iomanip>

namespace lgha {

/// One verified statement. kind is "rel" (pass iff rel_err <= tol), "abs"
/// (pass iff abs_err <= tol), "mc" (pass iff abs_err <= tol, tol being a
/// multiple of the standard error) or "exact" (a boolean outcome).
struct Check {
    std::string name;
    std::string paper_anchor;
    double lhs = 0.0, rhs = 0.0, abs_err = 0.0, rel_err = 0.0, tol = 0.0;
    bool pass = false;
    std::string kind = "rel";
    std::string note;
};

inline double rel_of(double lhs, double rhs)
{
    const double s = std::max(std::abs(lhs), std::abs(rhs));
    return s == 0.0 ? 0.0 : std::abs(lhs - rhs) / s;
}

inline Check rel_check(std::string name, std::string anchor, double lhs, double rhs, double tol)
{
    Check c{std::move(name), std::move(anchor), lhs, rhs, std::abs(lhs - rhs), rel_of(lhs, rhs), tol, false, "rel", {}};
    c.pass = c.rel_err <= tol;
    return c;
}

/// Reports a discrepancy already reduced to a nonnegative error.
inline Check abs_check(std::string name, std::string anchor, double err, double tol)
{
    Check c{std::move(name), std::move(anchor), err, 0.0, err, err, tol, false, "abs", {}};
    c.kind = "abs";
    c.pass = err <= tol;
    return c;
}

inline Check exact_check(std::string name, std::string anchor, bool ok, std::string note = {})
{
    Check c{std::move(name), std::move(anchor), ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, ok ? 0.0 : 1.0, 0.0, false, "exact", {}};
    c.kind = "exact";
    c.pass = ok;
    c.note = std::move(note);
    return c;
}

/// Passes when |lhs - rhs| <= sigmas * stderr.
inline Check mc_check(std::string name, std::string anchor, double lhs, double rhs, double stderr_, double sigmas = 3.0)
{
    Check c{std::move(name), std::move(anchor), lhs, rhs, std::abs(lhs - rhs), rel_of(lhs, rhs), sigmas * stderr_, false, "mc", {}};
    c.kind = "mc";
    c.pass = c.abs_err <= c.tol;
    c.note = "stderr=" + std::to_string(stderr_);
    return c;
}

struct Report {
    std::string suite;
    std::string timestamp;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config;
    std::vector<Check> checks;
    double wall_time_s = 0.0;

    std::size_t passed() const
    {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }));
    }
    std::size_t failed() const { return checks.size() - passed(); }
    bool all_pass() const { return failed() == 0; }
};

inline std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Non-finite numbers are written as strings so the JSON stays valid.
inline nlohmann::ordered_json number_json(double v)
{
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline nlohmann::ordered_json to_json(const Check& c)
{
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["paper_anchor"] = c.paper_anchor;
    j["kind"] = c.kind;
    j["lhs"] = number_json(c.lhs);
    j["rhs"] = number_json(c.rhs);
    j["abs_err"] = number_json(c.abs_err);
    j["rel_err"] = number_json(c.rel_err);
    j["tol"] = number_json(c.tol);
    j["pass"] = c.pass;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline nlohmann::ordered_json to_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["suite"] = r.suite;
    j["timestamp"] = r.timestamp;
    j["seed"] = r.seed;
    j["config"] = r.config;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    j["summary"] = {{"passed", r.passed()}, {"failed", r.failed()}, {"wall_time_s", r.wall_time_s}};
    return j;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string csv_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string to_csv(const Report& r)
{
    std::string out = "suite,name,paper_anchor,kind,lhs,rhs,abs_err,rel_err,tol,pass\n";
    for (const auto& c : r.checks) {
        out += csv_field(r.suite) + "," + csv_field(c.name) + "," + csv_field(c.paper_anchor) + "," + c.kind + "," +
               csv_number(c.lhs) + "," + csv_number(c.rhs) + "," + csv_number(c.abs_err) + "," + csv_number(c.rel_err) +
               "," + csv_number(c.tol) + "," + (c.pass ? "true" : "false") + "\n";
    }
    return out;
}

} // namespace lgha
