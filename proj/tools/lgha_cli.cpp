#include <lgha/suites.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace lgha;

namespace {

enum Exit { Pass = 0, CheckFailure = 1, ConfigFailure = 2, BudgetFailure = 3 };

std::size_t parse_count(const std::string& s, const std::string& flag)
{
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ConfigError(flag + " expects a number, got '" + s + "'");
    }
    if (!(v >= 1.0) || v > 1e15 || v != std::floor(v)) throw ConfigError(flag + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

int run_command(const std::string& suite, const std::string& config, const std::optional<std::uint64_t>& seed,
                const std::string& out, const std::string& format, const std::string& budget_grid,
                const std::string& budget_mc, bool quiet)
{
    SuiteConfig cfg;
    if (!config.empty()) load_config_file(cfg, config);
    if (!suite.empty()) cfg.suite = suite;
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out = out;
    if (!format.empty()) cfg.format = format;
    if (!budget_grid.empty()) cfg.budgets.max_grid_points = parse_count(budget_grid, "--budget-grid");
    if (!budget_mc.empty()) cfg.budgets.max_mc_samples = parse_count(budget_mc, "--budget-mc");
    cfg.validate();
    suite_batteries(cfg.suite);

    const auto observe = [&](const std::string& battery, const std::vector<Check>& checks, double secs) {
        if (quiet) return;
        for (const auto& c : checks)
            std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "  err=" << (c.kind == "rel" ? c.rel_err : c.abs_err) << " tol=" << c.tol << "\n";
        std::cerr << "-- " << battery << " " << std::fixed << std::setprecision(2) << secs << " s\n" << std::defaultfloat;
    };
    const Report r = run_suite(cfg, observe);
    const std::string text = cfg.format == "csv" ? to_csv(r) : to_json(r).dump(2) + "\n";
    if (cfg.out.empty())
        std::cout << text;
    else
        write_atomic(cfg.out, text);
    if (!quiet) std::cerr << r.passed() << " passed, " << r.failed() << " failed in " << r.wall_time_s << " s\n";
    return r.all_pass() ? Pass : CheckFailure;
}

int op_command(const std::string& expr)
{
    const PolyDiffOp op = parse_op(expr);
    std::cout << op.str() << "\norder " << op.order() << "\n";
    return Pass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Verification suites for harmonic analysis on the unipotent, compact and Iwasawa groups"};
    app.require_subcommand(0, 1);

    bool list = false;
    app.add_flag("--list", list, "List suites and batteries");

    std::string suite, suite_opt, config, out, format, budget_grid, budget_mc;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run a verification suite");
    run->add_option("name", suite, "Suite name");
    run->add_option("--suite", suite_opt, "Suite name");
    run->add_option("--seed", seed, "64-bit seed");
    run->add_option("--config", config, "JSON config file");
    run->add_option("--out", out, "Report path (stdout when omitted)");
    run->add_option("--format", format, "json or csv");
    run->add_option("--budget-grid", budget_grid, "Maximum grid points");
    run->add_option("--budget-mc", budget_mc, "Maximum Monte Carlo samples");
    run->add_flag("-q,--quiet", quiet, "No progress on stderr");

    std::string expr;
    auto* opc = app.add_subcommand("op", "Parse an operator expression and print its canonical form");
    opc->add_option("expr", expr, "Operator expression")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Pass : ConfigFailure;
    }

    try {
        if (list) {
            for (const auto& s : suite_names()) {
                std::cout << s;
                if (s != "all") {
                    std::cout << ":";
                    for (const auto& b : suite_batteries(s)) std::cout << " " << b;
                }
                std::cout << "\n";
            }
            return Pass;
        }
        if (*opc) return op_command(expr);
        if (*run) {
            if (!suite.empty() && !suite_opt.empty() && suite != suite_opt) throw ConfigError("conflicting suite names");
            return run_command(suite.empty() ? suite_opt : suite, config, seed, out, format, budget_grid, budget_mc, quiet);
        }
        std::cout << app.help();
        return ConfigFailure;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return BudgetFailure;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return CheckFailure;
    }
}
