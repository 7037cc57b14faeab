#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delayopt/profile.hpp"
#include "delayopt/quadfit.hpp"
#include "scenario.hpp"

namespace delayopt::cli {

// Pipeline stages in execution order. A run always starts at `profile` and
// proceeds through the requested stage; later stages depend on earlier ones.
enum class Stage : int { profile = 0, correct, fit, optimize, evaluate, plot };

std::optional<Stage> stage_from(const std::string& name);
const char* to_string(Stage stage);

enum class MatchKind { match, known_discrepancy, mismatch };

// One golden comparison between a computed value and its quoted counterpart.
struct Comparison {
    Stage stage = Stage::profile;
    std::string subject;  // "h=0.003", "a", "h_star", ...
    double computed = 0.0;
    double published = 0.0;
    MatchKind kind = MatchKind::match;
    std::string note;
};

// What the correction stage did to one row, for reporting.
struct CorrectionDetail {
    int index = 0;
    double h = 0.0;
    double original = 0.0;
    std::optional<double> interpolation;  // two-sided chord value, when computable
    double applied = 0.0;
    bool from_override = false;
    bool flagged = false;  // detected outlier vs. injected explicit correction
};

struct PipelineResult {
    Scenario scenario;
    int precision = 3;  // display/comparison decimals

    ProfileTable raw;      // full-precision computed profile
    ProfileTable working;  // raw with delays rounded to the working precision
    std::vector<int> flags;
    std::vector<CorrectionDetail> corrections;
    ProfileTable corrected;

    QuadraticModel fit;
    std::optional<QuadraticModel> published_model;
    std::optional<OptimalPoint> optimum;
    std::optional<OptimalPoint> optimum_published;
    std::vector<std::pair<double, double>> evaluated_fit;
    std::vector<std::pair<double, double>> evaluated_published;

    WarningList warnings;
    std::vector<Comparison> comparisons;
    Stage last_stage = Stage::profile;
};

struct PipelineOptions {
    Stage through = Stage::plot;
    bool compare = false;  // check stage outputs against scenario.reference
};

PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options);

int mismatch_count(const PipelineResult& result);

// Serialized report (fixed key set) — valid once the run reached `optimize`.
std::string format_report(const PipelineResult& result);

// Console rendering of every stage the run executed.
std::string format_console(const PipelineResult& result);

// Writes the artifact files the scenario requests for the executed stages.
void write_artifacts(const PipelineResult& result, const std::string& out_dir, bool svg);

}  // namespace delayopt::cli
