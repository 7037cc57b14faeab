// delayopt — sampled-data control delay toolkit.
//
// Subcommands run a scenario through the profile -> correct -> fit ->
// optimize -> evaluate -> plot pipeline up to the depth the command implies,
// plus `simulate` for time-domain runs and `reproduce` for the bundled
// reference cases with golden checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "delayopt/discretize.hpp"
#include "logging.hpp"
#include "pipeline.hpp"
#include "render.hpp"
#include "scenario.hpp"

namespace {

using delayopt::benchmark_plant;
using delayopt::errc;
using delayopt::error;
using delayopt::fail;
using delayopt::StateSpacePlant;
using delayopt::WarningList;
using namespace delayopt::cli;

struct Args {
    std::string scenario;
    std::string out = ".";
    std::string stage;
    std::string format = "csv";
    std::string case_name;
};

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string g10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Run the scenario pipeline through `through`, write artifacts, then print
// the buffered console output. Buffering means a failure anywhere produces no
// partial tables on stdout.
int run_stage_command(const Args& args, Stage through) {
    const Scenario scenario = load_scenario(args.scenario);
    PipelineOptions options;
    options.through = through;
    const PipelineResult result = run_pipeline(scenario, options);
    const std::string console = format_console(result);
    write_artifacts(result, args.out, args.format == "svg");
    log_warnings(result.warnings);
    std::cout << console;
    return 0;
}

int run_reproduce(const Args& args) {
    const Scenario scenario =
        args.scenario.empty()
            ? parse_scenario(embedded_scenario(args.case_name), "bundled " + args.case_name)
            : load_scenario(args.scenario);

    PipelineOptions options;
    options.compare = true;
    if (!args.stage.empty()) {
        const std::optional<Stage> st = stage_from(args.stage);
        if (!st) {
            fail(errc::usage, "unknown stage '" + args.stage +
                                  "' (expected profile|correct|fit|optimize|evaluate|plot)");
        }
        options.through = *st;
    }

    const PipelineResult result = run_pipeline(scenario, options);

    int match = 0, known = 0, mismatch = 0;
    for (const Comparison& c : result.comparisons) {
        switch (c.kind) {
            case MatchKind::match: ++match; break;
            case MatchKind::known_discrepancy: ++known; break;
            case MatchKind::mismatch: ++mismatch; break;
        }
    }
    std::ostringstream console;
    console << format_console(result);
    console << "\nreproduce " << scenario.name << ": " << match << " match, " << known
            << " known discrepancy, " << mismatch << " mismatch\n";

    write_artifacts(result, args.out, args.format == "svg");
    log_warnings(result.warnings);
    std::cout << console.str();
    if (mismatch > 0) {
        log(LogLevel::error, "reproduction of '" + scenario.name + "' deviates from the quoted "
                             "tables in " + std::to_string(mismatch) + " place(s)");
        return 1;
    }
    return 0;
}

int run_simulate(const Args& args) {
    const Scenario scenario = load_scenario(args.scenario);
    if (!scenario.simulation) {
        fail(errc::usage,
             "scenario '" + scenario.name + "' has no simulation section to run");
    }
    const SimulationSpec& sim = *scenario.simulation;

    std::ostringstream csv;
    std::ostringstream console;
    WarningList warnings;
    console << "== " << scenario.name << " · simulate ==\n";
    for (const std::string& note : scenario.notes) {
        console << "note: " << note << '\n';
    }

    if (sim.use_benchmark_plant) {
        const StateSpacePlant plant = benchmark_plant();
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(plant.n());
        for (std::size_t i = 0; i < sim.x0.size(); ++i) {
            x0(static_cast<Eigen::Index>(i)) = sim.x0[i];
        }
        const auto trajectory =
            delayopt::simulate(plant, sim.h, sim.tau, x0, sim.inputs, sim.steps, sim.u_prev0);
        csv << "t";
        for (Eigen::Index i = 0; i < plant.n(); ++i) csv << ",x" << (i + 1);
        csv << ",y,u\n";
        for (const auto& pt : trajectory) {
            csv << g17(pt.t);
            for (Eigen::Index i = 0; i < pt.x.size(); ++i) csv << ',' << g17(pt.x(i));
            csv << ',' << g17(pt.y) << ',' << g17(pt.u) << '\n';
        }
        const auto& last = trajectory.back();
        console << "benchmark plant, h=" << g10(sim.h) << ", tau=" << g10(sim.tau) << ", "
                << sim.steps << " steps\n";
        console << "final: t=" << g10(last.t) << ", y=" << g10(last.y) << '\n';
    } else {
        delayopt::validate(scenario.gains);
        const double x0 = sim.x0.empty() ? 0.0 : sim.x0[0];
        const auto trajectory = delayopt::simulate(scenario.gains, sim.h, sim.tau, x0, sim.inputs,
                                                   sim.steps, sim.u_prev0, &warnings);
        csv << "t,x,u\n";
        for (const auto& pt : trajectory) {
            csv << g17(pt.t) << ',' << g17(pt.x) << ',' << g17(pt.u) << '\n';
        }
        const auto& last = trajectory.back();
        console << "scalar loop, h=" << g10(sim.h) << ", tau=" << g10(sim.tau) << ", "
                << sim.steps << " steps\n";
        console << "final: t=" << g10(last.t) << ", x=" << g10(last.x) << '\n';
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) {
        fail(errc::usage, "cannot create output directory '" + args.out + "': " + ec.message());
    }
    const std::string path = (fs::path(args.out) / (scenario.name + "_trajectory.csv")).string();
    write_text_file(path, csv.str());
    console << "wrote " << path << '\n';

    log_warnings(warnings);
    std::cout << console.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        current_log_level() = log_level_from_env();
    } catch (const error& e) {
        log(LogLevel::error, e.what());
        return 2;
    }

    CLI::App app{"sampled-data control delay toolkit: delay profiles, outlier correction, "
                 "quadratic sampling-period optimization, and time-domain simulation"};
    app.require_subcommand(1);

    Args args;
    const auto add_common = [&](CLI::App* cmd, bool scenario_required) {
        auto* opt = cmd->add_option("--scenario", args.scenario, "scenario file (JSON)");
        if (scenario_required) opt->required();
        cmd->add_option("--out", args.out, "output directory for artifacts")
            ->capture_default_str();
        cmd->add_option("--format", args.format, "plot artifact format")
            ->check(CLI::IsMember({"csv", "svg"}))
            ->capture_default_str();
    };

    CLI::App* profile =
        app.add_subcommand("profile", "compute the delay profile from the scenario samples");
    add_common(profile, true);
    CLI::App* correct =
        app.add_subcommand("correct", "detect irregular rows and apply corrections");
    add_common(correct, true);
    CLI::App* fit = app.add_subcommand(
        "fit", "least-squares quadratic on the corrected profile, with its minimum");
    add_common(fit, true);
    CLI::App* optimize = app.add_subcommand(
        "optimize", "fit, locate the optimal sampling period, and evaluate the model");
    add_common(optimize, true);
    CLI::App* simulate =
        app.add_subcommand("simulate", "run the scenario's time-domain simulation");
    add_common(simulate, true);
    CLI::App* plot =
        app.add_subcommand("plot", "emit plot series (raw points, fitted curve, markers)");
    add_common(plot, true);
    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "run a bundled reference case end to end and check it against "
                     "its quoted tables");
    reproduce->add_option("case", args.case_name, "which bundled case to run (case1 or case2)")
        ->required();
    add_common(reproduce, false);
    reproduce->add_option("--stage", args.stage,
                          "stop after this stage (profile|correct|fit|optimize|evaluate|plot)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (profile->parsed()) return run_stage_command(args, Stage::profile);
        if (correct->parsed()) return run_stage_command(args, Stage::correct);
        // `fit` reports the model together with its minimum — the report file
        // carries vertex keys — so it runs through the optimize stage.
        if (fit->parsed()) return run_stage_command(args, Stage::optimize);
        if (optimize->parsed()) return run_stage_command(args, Stage::evaluate);
        if (simulate->parsed()) return run_simulate(args);
        if (plot->parsed()) return run_stage_command(args, Stage::plot);
        if (reproduce->parsed()) return run_reproduce(args);
    } catch (const error& e) {
        log(LogLevel::error, e.what());
        return (e.code() == errc::bad_input || e.code() == errc::usage) ? 2 : 1;
    } catch (const std::exception& e) {
        log(LogLevel::error, e.what());
        return 1;
    }
    return 0;
}
