#include <lgha/suites.hpp>

#include <cstdio>
#include <iostream>

using namespace lgha;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> batteries;
    double time_limit_s;
    std::function<bool(const Check&)> counts = [](const Check&) { return true; };
};

bool not_plumbing(const Check& c) { return c.paper_anchor != "plumbing"; }

std::string worst(const std::vector<Check>& checks)
{
    const Check* w = nullptr;
    double ratio = -1;
    for (const auto& c : checks) {
        const double err = c.kind == "rel" ? c.rel_err : c.abs_err;
        const double r = c.tol > 0 ? err / c.tol : (c.pass ? 0.0 : 1e300);
        if (r > ratio) {
            ratio = r;
            w = &c;
        }
    }
    if (!w) return "no checks";
    char buf[256];
    std::snprintf(buf, sizeof buf, "worst %s err=%.3g tol=%.3g", w->name.c_str(), w->kind == "rel" ? w->rel_err : w->abs_err, w->tol);
    return buf;
}

std::string canonical(const Report& r)
{
    auto j = to_json(r);
    j.erase("timestamp");
    j["summary"].erase("wall_time_s");
    return j.dump();
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "group laws match matrix arithmetic", {"group-laws"}, 1},
        {2, "printed unipotent inverse expansion", {"nil-inverse"}, 1,
         [](const Check& c) { return c.name == "nil-inverse/inverse-expansion-as-printed"; }},
        {3, "Iwasawa reconstruction for SL4 and SP4", {"iwasawa"}, 2},
        {4, "modulus factor equals conjugation Jacobian", {"modulus"}, 2},
        {5, "Plancherel on N", {"nil-plancherel"}, 30},
        {6, "bilinear identity on N, grid and Monte Carlo", {"nil-bilinear"}, 60},
        {7, "convolution equality at 10 L-points", {"nil-convolution-equality"}, 120},
        {8, "SO(4) Peter-Weyl at band limit 2", {"so4-peter-weyl"}, 10},
        {9, "combined Plancherel and factorized transforms", {"sl4-plancherel", "sp4-plancherel", "semidirect-plancherel"}, 60},
        {10, "lift invariances", {"nil-lift", "kna-lifts", "operator-lifts"}, 5},
        {11, "operator identities and mutation detection", {"operator-identities"}, 10},
        {12, "bracket condition", {"brackets"}, 1},
        {13, "constructive solvers", {"solvers"}, 120, not_plumbing},
    };

    SuiteConfig cfg;
    cfg.seed = 42;
    int failures = 0;
    for (const auto& cr : criteria) {
        std::vector<Check> all;
        double secs = 0;
        std::string error;
        try {
            for (const auto& b : cr.batteries) {
                cfg.suite = "all";
                const auto it = std::find_if(all_batteries().begin(), all_batteries().end(),
                                             [&](const NamedBattery& n) { return n.name == b; });
                const auto t0 = std::chrono::steady_clock::now();
                auto checks = it->run(cfg);
                secs += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                for (auto& c : checks) c.name = b + "/" + c.name;
                all.insert(all.end(), checks.begin(), checks.end());
            }
        } catch (const std::exception& e) {
            error = e.what();
        }
        std::vector<Check> counted;
        std::copy_if(all.begin(), all.end(), std::back_inserter(counted), cr.counts);
        const std::size_t failed = std::count_if(counted.begin(), counted.end(), [](const Check& c) { return !c.pass; });
        const bool ok = error.empty() && !counted.empty() && failed == 0 && secs < cr.time_limit_s;
        failures += !ok;
        std::printf("%s  criterion %2d  %-48s %zu/%zu checks  %.2f s (limit %.0f s)  %s\n", ok ? "PASS" : "FAIL", cr.id,
                    cr.title.c_str(), counted.size() - failed, counted.size(), secs, cr.time_limit_s,
                    error.empty() ? worst(counted).c_str() : ("error: " + error).c_str());
        for (const auto& c : counted)
            if (!c.pass)
                std::printf("        failed %s  err=%.3g tol=%.3g\n", c.name.c_str(), c.kind == "rel" ? c.rel_err : c.abs_err, c.tol);
        std::fflush(stdout);
    }

    {
        cfg.suite = "all";
        std::string error;
        double t1 = 0, t2 = 0;
        bool same = false;
        try {
            const Report a = run_suite(cfg), b = run_suite(cfg);
            t1 = a.wall_time_s;
            t2 = b.wall_time_s;
            same = canonical(a) == canonical(b);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const bool ok = error.empty() && same && t1 < 600 && t2 < 600;
        failures += !ok;
        std::printf("%s  criterion 14  %-48s identical=%s  runs %.1f s and %.1f s (limit 600 s)%s\n", ok ? "PASS" : "FAIL",
                    "run all is deterministic and fast", same ? "yes" : "no", t1, t2, error.empty() ? "" : (" error: " + error).c_str());
    }
    std::printf("%d of 14 criteria failed\n", failures);
    return failures ? 1 : 0;
}
