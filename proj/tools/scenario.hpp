#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delayopt/types.hpp"

namespace delayopt::cli {

// A declared, explained difference between what this implementation computes
// and what the reference tables quote for the same cell. Reproduction runs
// verify the declared `computed` value against the live computation and then
// report the cell loudly instead of failing on it.
struct KnownDiscrepancy {
    std::string stage;   // pipeline stage the cell belongs to
    double h = 0.0;      // row key
    double computed = 0.0;
    double published = 0.0;
    std::string note;
};

// Quadratic coefficients as quoted alongside the reference tables, with the
// decimal precision each one was printed at (they do not share one rule).
struct CoefficientRef {
    double a = 0.0, b = 0.0, c = 0.0;
    int a_decimals = 0, b_decimals = 0, c_decimals = 0;
    std::vector<std::string> notes;
};

struct VertexRef {
    double h = 0.0;
    double tau = 0.0;
};

// Golden data a reproduction run compares against.
struct Reference {
    std::vector<double> profile_tau;    // quoted delay column, one per sample
    std::vector<double> corrected_tau;  // quoted corrected delay column
    std::optional<CoefficientRef> coefficients;
    std::optional<VertexRef> vertex;
    // Quoted model evaluations per sample row; nullopt where the source
    // table omits the row.
    std::vector<std::optional<double>> evaluated_tau;
    std::vector<KnownDiscrepancy> known_discrepancies;
};

// Input description for the `simulate` command.
struct SimulationSpec {
    bool use_benchmark_plant = true;  // false: simulate the scalar loop itself
    double h = 0.0;
    double tau = 0.0;
    int steps = 0;
    std::vector<double> inputs;  // expanded from the input spec at load time
    std::vector<double> x0;      // empty means zeros
    double u_prev0 = 0.0;
};

struct Scenario {
    std::string name;
    ScalarLoopGains gains;
    std::vector<std::pair<double, double>> samples;  // (h, ratio)
    bool samples_declared = false;
    std::string profile_csv;  // alternative row source
    std::optional<int> table_precision;  // work on tables rounded to this many decimals
    std::vector<std::pair<double, double>> corrections;  // h -> replacement tau
    std::vector<std::string> outputs;  // artifact names to write
    bool outputs_declared = false;
    std::vector<std::string> notes;
    std::optional<Reference> reference;
    std::optional<SimulationSpec> simulation;
};

inline const std::vector<std::string>& known_output_names() {
    static const std::vector<std::string> names = {"profile",  "corrected", "fit",
                                                   "vertex",   "evaluated", "plot"};
    return names;
}

// Structural checks every scenario must pass, command-independent.
void validate(const Scenario& scenario);

// Additional requirements for commands that run the profile pipeline:
// exactly one non-empty row source, valid gains, non-empty output list.
void require_profile_source(const Scenario& scenario);

bool wants_output(const Scenario& scenario, const std::string& artifact);

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& origin);

// Bundled configurations for the two reference operating points.
const std::string& embedded_scenario(const std::string& case_name);

}  // namespace delayopt::cli
