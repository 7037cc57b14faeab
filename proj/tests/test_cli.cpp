// End-to-end tests of the delayopt command-line binary. The binary path
// arrives in DELAYOPT_CLI and the bundled scenario directory in
// DELAYOPT_SCENARIOS (both set by the test harness); without DELAYOPT_CLI the
// cases skip with a message rather than fail, so the test executable stays
// runnable on its own.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    REQUIRE(out.good());
}

fs::path scratch_root() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() /
                     ("delayopt_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path p = scratch_root() / (tag + "_" + std::to_string(++counter));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Runs the binary through /bin/sh with stdout/stderr captured to files.
// `env` entries are prepended as VAR=value assignments.
CliResult run_cli(const std::string& cli, const std::string& args,
                  const std::vector<std::pair<std::string, std::string>>& env = {}) {
    static int counter = 0;
    const fs::path out_file = scratch_root() / ("stdout_" + std::to_string(++counter));
    const fs::path err_file = scratch_root() / ("stderr_" + std::to_string(counter));
    std::string cmd;
    for (const auto& [k, v] : env) {
        cmd += k + "='" + v + "' ";
    }
    cmd += "'" + cli + "' " + args + " > '" + out_file.string() + "' 2> '" +
           err_file.string() + "'";
    const int raw = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

const char* cli_or_null() { return std::getenv("DELAYOPT_CLI"); }

#define REQUIRE_CLI()                                               \
    const char* cli_env = cli_or_null();                            \
    if (cli_env == nullptr) {                                       \
        MESSAGE("DELAYOPT_CLI not set; CLI test skipped");          \
        return;                                                     \
    }                                                               \
    const std::string cli(cli_env)

const std::string kCase1Inline = R"json({
  "name": "inline1",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "samples": [[0.001, 26.0], [0.002, 23.0], [0.003, 20.0], [0.004, 18.0], [0.005, 16.0]],
  "table_precision": 3,
  "corrections": [[0.003, 0.026], [0.005, 0.108]]
})json";

}  // namespace

TEST_CASE("cli: reproduce case1 passes its golden checks") {
    REQUIRE_CLI();
    const fs::path out = fresh_dir("rep1");
    const CliResult r = run_cli(cli, "reproduce case1 --out '" + out.string() + "'");
    CAPTURE(r.out);
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "0.118"));
    CHECK(contains(r.out, "reproduce case1: 18 match, 1 known discrepancy, 0 mismatch"));
    CHECK(contains(r.out, "known discrepancy"));
    CHECK_FALSE(contains(r.out, "MISMATCH"));
    CHECK(fs::exists(out / "case1_profile.csv"));
    CHECK(fs::exists(out / "case1_corrected.csv"));
    CHECK(fs::exists(out / "case1_report.json"));
    CHECK(fs::exists(out / "case1_evaluated.csv"));
    CHECK(fs::exists(out / "case1_profile_series.csv"));
    CHECK(fs::exists(out / "case1_fit_curve.csv"));
    CHECK(fs::exists(out / "case1_fit_markers.csv"));
}

TEST_CASE("cli: reproduce case2 passes its golden checks") {
    REQUIRE_CLI();
    const fs::path out = fresh_dir("rep2");
    const CliResult r = run_cli(cli, "reproduce case2 --out '" + out.string() + "'");
    CAPTURE(r.out);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "reproduce case2: 20 match, 0 known discrepancy, 0 mismatch"));
    CHECK(contains(r.out, "0.063"));
    CHECK(contains(r.out, "manual_override"));
}

TEST_CASE("cli: report file carries the fixed key set in order") {
    REQUIRE_CLI();
    const fs::path out = fresh_dir("report");
    const CliResult r = run_cli(cli, "reproduce case1 --out '" + out.string() + "'");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::ordered_json::parse(slurp(out / "case1_report.json"));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    const std::vector<std::string> want = {"a_exact",  "b_exact",        "c_exact",
                                           "a_paper",  "b_paper",        "c_paper",
                                           "h_star",   "tau_star_exact", "tau_star_paper",
                                           "sse",      "warnings"};
    CHECK(keys == want);
    CHECK(j["a_exact"].get<double>() == doctest::Approx(0.2264).epsilon(1e-9));
    CHECK(j["b_exact"].get<double>() == doctest::Approx(-135.82857142857143).epsilon(1e-9));
    CHECK(j["c_exact"].get<double>() == doctest::Approx(22571.428571428572).epsilon(1e-9));
    CHECK(j["a_paper"].get<double>() == doctest::Approx(0.23));
    CHECK(j["b_paper"].get<double>() == doctest::Approx(-136.0));
    CHECK(j["c_paper"].get<double>() == doctest::Approx(22571.0));
    CHECK(j["tau_star_paper"].get<double>() == doctest::Approx(0.0251353).epsilon(1e-4));
    CHECK(j["warnings"].is_array());
}

TEST_CASE("cli: repeated runs produce byte-identical artifacts") {
    REQUIRE_CLI();
    const fs::path out1 = fresh_dir("det");
    const fs::path out2 = fresh_dir("det");
    REQUIRE(run_cli(cli, "reproduce case2 --out '" + out1.string() + "'").exit_code == 0);
    REQUIRE(run_cli(cli, "reproduce case2 --out '" + out2.string() + "'").exit_code == 0);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(out1)) {
        const fs::path twin = out2 / entry.path().filename();
        REQUIRE(fs::exists(twin));
        CHECK(slurp(entry.path()) == slurp(twin));
        ++compared;
    }
    CHECK(compared >= 7);
}

TEST_CASE("cli: --stage profile stops the pipeline after the first stage") {
    REQUIRE_CLI();
    const fs::path out = fresh_dir("stage");
    const CliResult r =
        run_cli(cli, "reproduce case1 --stage profile --out '" + out.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "case1 · profile"));
    CHECK_FALSE(contains(r.out, "case1 · fit"));
    CHECK(fs::exists(out / "case1_profile.csv"));
    CHECK_FALSE(fs::exists(out / "case1_corrected.csv"));
    CHECK_FALSE(fs::exists(out / "case1_report.json"));
}

TEST_CASE("cli: usage failures exit 2") {
    REQUIRE_CLI();
    CHECK(run_cli(cli, "frobnicate").exit_code == 2);
    CHECK(run_cli(cli, "profile").exit_code == 2);  // --scenario is required
    CHECK(run_cli(cli, "profile --scenario /nonexistent/path.json").exit_code == 2);
    CHECK(run_cli(cli, "reproduce case9").exit_code == 2);
    CHECK(run_cli(cli, "reproduce case1 --stage warp").exit_code == 2);
    CHECK(run_cli(cli, "reproduce case1 --format tiff").exit_code == 2);

    const fs::path dir = fresh_dir("usage");
    spit(dir / "broken.json", "{ not json");
    CHECK(run_cli(cli, "profile --scenario '" + (dir / "broken.json").string() + "'")
              .exit_code == 2);
    spit(dir / "empty.json",
         R"({"name": "e", "gains": {"A": -6.0, "B": 6.0, "k": 32.0}, "samples": []})");
    const CliResult r =
        run_cli(cli, "profile --scenario '" + (dir / "empty.json").string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "samples list is empty"));
}

TEST_CASE("cli: invalid DELAYOPT_LOG is a configuration error") {
    REQUIRE_CLI();
    const CliResult r = run_cli(cli, "reproduce case1", {{"DELAYOPT_LOG", "chatty"}});
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "DELAYOPT_LOG"));
    CHECK(r.out.empty());
}

TEST_CASE("cli: log level controls stderr verbosity") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("log");
    const std::string args =
        "reproduce case1 --stage correct --out '" + (dir / "o").string() + "'";
    const CliResult quiet = run_cli(cli, args, {{"DELAYOPT_LOG", "error"}});
    CHECK(quiet.exit_code == 0);
    CHECK(quiet.err.empty());
    const CliResult chatty = run_cli(cli, args, {{"DELAYOPT_LOG", "debug"}});
    CHECK(chatty.exit_code == 0);
    CHECK(contains(chatty.err, "delayopt info: stage profile"));
    CHECK(contains(chatty.err, "delayopt debug: profile row"));
}

TEST_CASE("cli: computation failures exit 1 and print no partial tables") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("domain");
    spit(dir / "ood.json", R"({
  "name": "ood",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "samples": [[0.001, 40.0], [0.002, 23.0], [0.003, 20.0]]
})");
    const CliResult r =
        run_cli(cli, "profile --scenario '" + (dir / "ood.json").string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(contains(r.err, "row h=0.001"));
    CHECK(contains(r.err, "log argument"));
}

TEST_CASE("cli: golden deviations are reported as mismatches and exit 1") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("mismatch");
    spit(dir / "mut.json", R"({
  "name": "mut",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "samples": [[0.001, 26.0], [0.002, 23.0], [0.003, 20.0], [0.004, 18.0], [0.005, 16.0]],
  "table_precision": 3,
  "corrections": [[0.003, 0.026], [0.005, 0.108]],
  "reference": {"profile_tau": [0.5, 0.034, 0.078, 0.05, 0.107]}
})");
    const CliResult r = run_cli(cli, "reproduce case1 --scenario '" +
                                         (dir / "mut.json").string() + "' --stage profile --out '" +
                                         (dir / "o").string() + "'");
    CHECK(r.exit_code == 1);
    // 0.5 is simply wrong; 0.107 deviates but carries no declaration in this
    // scenario, so it must count as a mismatch too.
    CHECK(contains(r.out, "2 MISMATCH"));
    CHECK(contains(r.out, "reproduce mut: 3 match, 0 known discrepancy, 2 mismatch"));
}

TEST_CASE("cli: plot on an empty profile is a usage-class failure") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("emptyplot");
    spit(dir / "rows.csv", "h,ratio,tau,corrected,source\n");
    spit(dir / "hdr.json", R"({"name": "hdr", "gains": {"A": -6.0, "B": 6.0, "k": 32.0}, "profile_csv": ")" +
                               (dir / "rows.csv").string() + R"("})");
    const CliResult r =
        run_cli(cli, "plot --scenario '" + (dir / "hdr.json").string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "empty profile"));
}

TEST_CASE("cli: plot emits the three series files with the documented shapes") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("plot");
    spit(dir / "sc.json", kCase1Inline);
    const CliResult r = run_cli(cli, "plot --scenario '" + (dir / "sc.json").string() +
                                         "' --out '" + (dir / "o").string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string series = slurp(dir / "o" / "inline1_profile_series.csv");
    const std::string curve = slurp(dir / "o" / "inline1_fit_curve.csv");
    const std::string markers = slurp(dir / "o" / "inline1_fit_markers.csv");
    CHECK(count_lines(series) == 6);   // header + 5 raw points
    CHECK(count_lines(curve) == 201);  // header + 200 curve samples
    CHECK(count_lines(markers) == 6);  // header + 5 corrected points
    CHECK(series.substr(0, 6) == "h,tau\n");
    CHECK_FALSE(fs::exists(dir / "o" / "inline1_plot.svg"));  // csv is the default
}

TEST_CASE("cli: --format svg additionally renders the figure") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("svg");
    spit(dir / "sc.json", kCase1Inline);
    const CliResult r = run_cli(cli, "plot --scenario '" + (dir / "sc.json").string() +
                                         "' --out '" + (dir / "o").string() + "' --format svg");
    REQUIRE(r.exit_code == 0);
    const std::string svg = slurp(dir / "o" / "inline1_plot.svg");
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "sampling period"));
}

TEST_CASE("cli: fit without reference data reports null published entries") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("fitnull");
    spit(dir / "sc.json", kCase1Inline);
    const CliResult r = run_cli(cli, "fit --scenario '" + (dir / "sc.json").string() +
                                         "' --out '" + (dir / "o").string() + "'");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::ordered_json::parse(slurp(dir / "o" / "inline1_report.json"));
    CHECK(j["a_paper"].is_null());
    CHECK(j["b_paper"].is_null());
    CHECK(j["c_paper"].is_null());
    CHECK(j["tau_star_paper"].is_null());
    CHECK(j["b_exact"].get<double>() == doctest::Approx(-135.82857142857143).epsilon(1e-9));
    // fit runs through the optimize stage but not evaluate/plot
    CHECK_FALSE(fs::exists(dir / "o" / "inline1_evaluated.csv"));
    CHECK_FALSE(fs::exists(dir / "o" / "inline1_fit_curve.csv"));
}

TEST_CASE("cli: optimize additionally writes the evaluated grid") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("opt");
    spit(dir / "sc.json", kCase1Inline);
    const CliResult r = run_cli(cli, "optimize --scenario '" + (dir / "sc.json").string() +
                                         "' --out '" + (dir / "o").string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string evaluated = slurp(dir / "o" / "inline1_evaluated.csv");
    CHECK(count_lines(evaluated) == 6);
    CHECK(evaluated.substr(0, 24) == "h,tau_fit,tau_published\n");
    // no quoted model in this scenario: the third column stays empty
    CHECK(contains(evaluated, ","));
    CHECK_FALSE(fs::exists(dir / "o" / "inline1_fit_curve.csv"));
}

TEST_CASE("cli: correct on the bundled case2 file applies the quoted override") {
    REQUIRE_CLI();
    const char* scen_dir = std::getenv("DELAYOPT_SCENARIOS");
    if (scen_dir == nullptr) {
        MESSAGE("DELAYOPT_SCENARIOS not set; skipped");
        return;
    }
    const fs::path dir = fresh_dir("correct");
    const CliResult r =
        run_cli(cli, "correct --scenario '" + (fs::path(scen_dir) / "case2.json").string() +
                         "' --out '" + dir.string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string corrected = slurp(dir / "case2_corrected.csv");
    CHECK(contains(corrected, "0.063,true,manual_override"));
    // the four untouched rows keep their computed provenance
    std::size_t untouched = 0;
    for (std::size_t at = corrected.find("false,computed"); at != std::string::npos;
         at = corrected.find("false,computed", at + 1)) {
        ++untouched;
    }
    CHECK(untouched == 4);
    CHECK_FALSE(fs::exists(dir / "case2_report.json"));
}

TEST_CASE("cli: simulate writes the trajectory and reaches the plant's DC gain") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("sim");
    spit(dir / "sim.json", R"({
  "name": "simcase",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "simulation": {"plant": "benchmark", "h": 0.01, "tau": 0.002, "steps": 2000,
                 "input": {"type": "step", "amplitude": 1.0}}
})");
    const CliResult r = run_cli(cli, "simulate --scenario '" + (dir / "sim.json").string() +
                                         "' --out '" + (dir / "o").string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "o" / "simcase_trajectory.csv");
    CHECK(count_lines(csv) == 2002);  // header + steps + terminal point
    CHECK(csv.substr(0, 15) == "t,x1,x2,x3,y,u\n");
    // last line: t=20, y within 1e-3 of the unit DC gain
    const std::size_t tail = csv.rfind('\n', csv.size() - 2);
    std::istringstream last(csv.substr(tail + 1));
    std::string cell;
    std::vector<double> cells;
    while (std::getline(last, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 6);
    CHECK(cells[0] == doctest::Approx(20.0));
    CHECK(cells[4] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("cli: scalar simulation past one period warns on stderr but runs") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("simwarn");
    spit(dir / "sim.json", R"({
  "name": "lagsim",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "simulation": {"plant": "loop", "h": 0.005, "tau": 0.009, "steps": 50,
                 "input": {"type": "step"}}
})");
    const CliResult r = run_cli(cli, "simulate --scenario '" + (dir / "sim.json").string() +
                                         "' --out '" + (dir / "o").string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.err, "delay_exceeds_period"));
    CHECK(count_lines(slurp(dir / "o" / "lagsim_trajectory.csv")) == 52);
}

TEST_CASE("cli: simulate without a simulation section is a usage error") {
    REQUIRE_CLI();
    const fs::path dir = fresh_dir("nosim");
    spit(dir / "sc.json", kCase1Inline);
    const CliResult r = run_cli(cli, "simulate --scenario '" + (dir / "sc.json").string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "no simulation section"));
}

TEST_CASE("cli: bundled scenario files load from disk like any other scenario") {
    REQUIRE_CLI();
    const char* scen_dir = std::getenv("DELAYOPT_SCENARIOS");
    if (scen_dir == nullptr) {
        MESSAGE("DELAYOPT_SCENARIOS not set; skipped");
        return;
    }
    const fs::path dir = fresh_dir("fromdisk");
    const CliResult from_file =
        run_cli(cli, "reproduce case1 --scenario '" +
                         (fs::path(scen_dir) / "case1.json").string() + "' --out '" +
                         (dir / "a").string() + "'");
    const CliResult bundled =
        run_cli(cli, "reproduce case1 --out '" + (dir / "b").string() + "'");
    CHECK(from_file.exit_code == 0);
    CHECK(bundled.exit_code == 0);
    // on-disk file and compiled-in copy must stay in lockstep
    CHECK(from_file.out == bundled.out);
    CHECK(slurp(dir / "a" / "case1_report.json") == slurp(dir / "b" / "case1_report.json"));
}
