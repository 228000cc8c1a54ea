#include <lgha/suites.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>

using namespace lgha;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result cli(const std::string& args)
{
    const std::string cmd = std::string(LGHA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("lgha_cli_" + name); }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

nlohmann::json without_timing(nlohmann::json j)
{
    j.erase("timestamp");
    j["summary"].erase("wall_time_s");
    return j;
}

} // namespace

TEST(Cli, ListsSuites)
{
    const auto r = cli("--list");
    EXPECT_EQ(r.code, 0);
    for (const auto& s : suite_names()) EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Cli, PassingSuiteExitsZero)
{
    const auto out = tmp("so4.json");
    const auto r = cli("run so4 --out " + out.string());
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["suite"], "so4");
    EXPECT_EQ(j["summary"]["failed"], 0);
    for (const auto& c : j["checks"]) {
        EXPECT_FALSE(c["paper_anchor"].get<std::string>().empty());
        EXPECT_TRUE(c.contains("rel_err") && c.contains("tol") && c.contains("pass"));
    }
    EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST(Cli, FailingCheckExitsOne)
{
    const auto r = cli("run groups");
    EXPECT_EQ(r.code, 1);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["summary"]["failed"], 1);
}

TEST(Cli, ConfigErrorsExitTwo)
{
    const auto bad_key = tmp("bad_key.json");
    write(bad_key, R"({"suite": "so4", "sede": 3})");
    EXPECT_EQ(cli("run --config " + bad_key.string()).code, 2);
    const auto bad_tol = tmp("bad_tol.json");
    write(bad_tol, R"({"tolerances": {"nonsense": 1e-3}})");
    EXPECT_EQ(cli("run so4 --config " + bad_tol.string()).code, 2);
    const auto bad_budget = tmp("bad_budget.json");
    write(bad_budget, R"({"budgets": {"max_grid_points": 0}})");
    EXPECT_EQ(cli("run so4 --config " + bad_budget.string()).code, 2);
    const auto malformed = tmp("malformed.json");
    write(malformed, "{\"suite\": ");
    EXPECT_EQ(cli("run so4 --config " + malformed.string()).code, 2);
    EXPECT_EQ(cli("run no-such-suite").code, 2);
    EXPECT_EQ(cli("run so4 --format xml").code, 2);
    EXPECT_EQ(cli("run so4 --budget-grid abc").code, 2);
    EXPECT_EQ(cli("run so4 --bogus-flag").code, 2);
}

TEST(Cli, BudgetErrorExitsThree)
{
    const auto cfg = tmp("budget.json");
    write(cfg, R"({"suite": "so4", "budgets": {"max_so4_bandlimit": 1}})");
    EXPECT_EQ(cli("run --config " + cfg.string()).code, 3);
    EXPECT_EQ(cli("run solvers --budget-grid 1000").code, 3);
}

TEST(Cli, ConfigFileIsApplied)
{
    const auto cfg = tmp("cfg.json");
    const auto out = tmp("cfg_out.json");
    write(cfg, R"({"suite": "so4", "seed": 7, "tolerances": {"so4_schur": 1e-11}, "output": ")" + out.string() + "\"}");
    EXPECT_EQ(cli("run --config " + cfg.string()).code, 0);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["config"]["tolerances"]["so4_schur"], 1e-11);
}

TEST(Cli, SameSeedGivesIdenticalReports)
{
    const auto a = tmp("det_a.json"), b = tmp("det_b.json");
    ASSERT_EQ(cli("run groups --seed 42 --out " + a.string()).code, 1);
    ASSERT_EQ(cli("run groups --seed 42 --out " + b.string()).code, 1);
    EXPECT_EQ(without_timing(nlohmann::json::parse(slurp(a))), without_timing(nlohmann::json::parse(slurp(b))));
    const auto c = tmp("det_c.json");
    ASSERT_EQ(cli("run groups --seed 43 --out " + c.string()).code, 1);
    EXPECT_NE(without_timing(nlohmann::json::parse(slurp(a))), without_timing(nlohmann::json::parse(slurp(c))));
}

TEST(Cli, CsvRows)
{
    const auto r = cli("run so4 --format csv");
    EXPECT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "suite,name,paper_anchor,kind,lhs,rhs,abs_err,rel_err,tol,pass");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.rfind("so4,", 0), 0u);
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}

TEST(Cli, OperatorCommand)
{
    const auto r = cli("op \"(-1)*dx + (-i)*dy + (-2*y)*dz + (2*i*x)*dz\"");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("order 1"), std::string::npos);
    EXPECT_EQ(cli("op \"dx +\"").code, 2);
}

TEST(Config, RejectsUnknownKeysInProcess)
{
    SuiteConfig c;
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse(R"({"budgets": {"max_cpu": 3}})")), ConfigError);
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse(R"({"seed": -1})")), ConfigError);
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse("[1, 2]")), ConfigError);
    apply_config_json(c, nlohmann::json::parse(R"({"budgets": {"max_mc_samples": 5000}})"));
    EXPECT_EQ(c.budgets.max_mc_samples, 5000u);
}

TEST(Report, NonFiniteNumbersStayValidJson)
{
    Report r;
    r.checks.push_back(abs_check("n", "plumbing", std::numeric_limits<double>::quiet_NaN(), 1.0));
    const auto text = to_json(r).dump();
    EXPECT_TRUE(nlohmann::json::accept(text));
    EXPECT_FALSE(r.all_pass());
}
