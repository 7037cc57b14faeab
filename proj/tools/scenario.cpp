#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "delayopt/discretize.hpp"
#include "delayopt/errors.hpp"
#include "json.hpp"

namespace delayopt::cli {

namespace {

using nlohmann::json;

[[noreturn]] void scenario_fail(const std::string& origin, const std::string& what) {
    fail(errc::bad_input, "scenario " + origin + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& origin) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        scenario_fail(origin, "missing required key '" + key + "'");
    }
    return *it;
}

double number_at(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_number()) {
        scenario_fail(origin, "'" + key + "' must be a number");
    }
    return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& origin) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) {
        scenario_fail(origin, "'" + key + "' must be a number");
    }
    return it->get<double>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where, const std::string& origin) {
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            scenario_fail(origin, "unknown key '" + item.key() + "' in " + where);
        }
    }
}

std::vector<std::pair<double, double>> pair_list(const json& arr, const std::string& what,
                                                 const std::string& origin) {
    if (!arr.is_array()) {
        scenario_fail(origin, what + " must be an array of [x, y] pairs");
    }
    std::vector<std::pair<double, double>> out;
    for (const json& entry : arr) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number()) {
            scenario_fail(origin, what + " entries must be two-element number arrays");
        }
        out.push_back({entry[0].get<double>(), entry[1].get<double>()});
    }
    return out;
}

std::vector<std::string> string_list(const json& arr, const std::string& what,
                                     const std::string& origin) {
    if (!arr.is_array()) {
        scenario_fail(origin, what + " must be an array of strings");
    }
    std::vector<std::string> out;
    for (const json& entry : arr) {
        if (!entry.is_string()) {
            scenario_fail(origin, what + " entries must be strings");
        }
        out.push_back(entry.get<std::string>());
    }
    return out;
}

Reference parse_reference(const json& obj, const std::string& origin) {
    check_keys(obj,
               {"profile_tau", "corrected_tau", "coefficients", "vertex", "evaluated_tau",
                "known_discrepancies"},
               "reference", origin);
    Reference ref;
    if (obj.contains("profile_tau")) {
        for (const json& v : member(obj, "profile_tau", origin)) {
            if (!v.is_number()) scenario_fail(origin, "profile_tau entries must be numbers");
            ref.profile_tau.push_back(v.get<double>());
        }
    }
    if (obj.contains("corrected_tau")) {
        for (const json& v : member(obj, "corrected_tau", origin)) {
            if (!v.is_number()) scenario_fail(origin, "corrected_tau entries must be numbers");
            ref.corrected_tau.push_back(v.get<double>());
        }
    }
    if (obj.contains("coefficients")) {
        const json& c = obj["coefficients"];
        check_keys(c, {"a", "b", "c", "a_decimals", "b_decimals", "c_decimals", "notes"},
                   "reference.coefficients", origin);
        CoefficientRef cr;
        cr.a = number_at(c, "a", origin);
        cr.b = number_at(c, "b", origin);
        cr.c = number_at(c, "c", origin);
        cr.a_decimals = static_cast<int>(number_at(c, "a_decimals", origin));
        cr.b_decimals = static_cast<int>(number_at(c, "b_decimals", origin));
        cr.c_decimals = static_cast<int>(number_at(c, "c_decimals", origin));
        if (c.contains("notes")) {
            cr.notes = string_list(c["notes"], "reference.coefficients.notes", origin);
        }
        ref.coefficients = cr;
    }
    if (obj.contains("vertex")) {
        const json& v = obj["vertex"];
        check_keys(v, {"h", "tau"}, "reference.vertex", origin);
        ref.vertex = VertexRef{number_at(v, "h", origin), number_at(v, "tau", origin)};
    }
    if (obj.contains("evaluated_tau")) {
        for (const json& v : obj["evaluated_tau"]) {
            if (v.is_null()) {
                ref.evaluated_tau.push_back(std::nullopt);
            } else if (v.is_number()) {
                ref.evaluated_tau.push_back(v.get<double>());
            } else {
                scenario_fail(origin, "evaluated_tau entries must be numbers or null");
            }
        }
    }
    if (obj.contains("known_discrepancies")) {
        for (const json& k : obj["known_discrepancies"]) {
            check_keys(k, {"stage", "h", "computed", "published", "note"},
                       "reference.known_discrepancies", origin);
            KnownDiscrepancy kd;
            kd.stage = member(k, "stage", origin).get<std::string>();
            kd.h = number_at(k, "h", origin);
            kd.computed = number_at(k, "computed", origin);
            kd.published = number_at(k, "published", origin);
            if (k.contains("note")) kd.note = k["note"].get<std::string>();
            ref.known_discrepancies.push_back(kd);
        }
    }
    return ref;
}

SimulationSpec parse_simulation(const json& obj, const std::string& origin) {
    check_keys(obj, {"plant", "h", "tau", "steps", "input", "x0", "u_prev0"}, "simulation",
               origin);
    SimulationSpec sim;
    const std::string plant = member(obj, "plant", origin).get<std::string>();
    if (plant == "benchmark") {
        sim.use_benchmark_plant = true;
    } else if (plant == "loop") {
        sim.use_benchmark_plant = false;
    } else {
        scenario_fail(origin, "simulation.plant must be 'benchmark' or 'loop'");
    }
    sim.h = number_at(obj, "h", origin);
    sim.tau = number_or(obj, "tau", 0.0, origin);
    const double steps = number_at(obj, "steps", origin);
    if (!(steps >= 0.0) || steps != std::floor(steps) || steps > 1e8) {
        scenario_fail(origin, "simulation.steps must be a nonnegative integer");
    }
    sim.steps = static_cast<int>(steps);

    const json& input = member(obj, "input", origin);
    check_keys(input, {"type", "amplitude", "values"}, "simulation.input", origin);
    const std::string type = member(input, "type", origin).get<std::string>();
    if (type == "step") {
        const double amplitude = number_or(input, "amplitude", 1.0, origin);
        sim.inputs.assign(static_cast<std::size_t>(sim.steps), amplitude);
    } else if (type == "values") {
        for (const json& v : member(input, "values", origin)) {
            if (!v.is_number()) {
                scenario_fail(origin, "simulation.input.values entries must be numbers");
            }
            sim.inputs.push_back(v.get<double>());
        }
    } else {
        scenario_fail(origin, "simulation.input.type must be 'step' or 'values'");
    }

    if (obj.contains("x0")) {
        for (const json& v : obj["x0"]) {
            if (!v.is_number()) scenario_fail(origin, "simulation.x0 entries must be numbers");
            sim.x0.push_back(v.get<double>());
        }
    }
    sim.u_prev0 = number_or(obj, "u_prev0", 0.0, origin);
    return sim;
}

}  // namespace

void validate(const Scenario& scenario) {
    if (scenario.name.empty()) {
        fail(errc::bad_input, "scenario: name must be non-empty");
    }
    const std::string origin = "'" + scenario.name + "'";
    if (scenario.samples_declared && scenario.samples.empty()) {
        scenario_fail(origin, "samples list is empty");
    }
    if (!scenario.samples.empty() && !scenario.profile_csv.empty()) {
        scenario_fail(origin, "declare either inline samples or profile_csv, not both");
    }
    if (scenario.outputs_declared && scenario.outputs.empty()) {
        scenario_fail(origin, "outputs list is empty");
    }
    std::set<std::string> seen;
    for (const std::string& artifact : scenario.outputs) {
        const auto& known = known_output_names();
        if (std::find(known.begin(), known.end(), artifact) == known.end()) {
            scenario_fail(origin, "unknown output artifact '" + artifact + "'");
        }
        if (!seen.insert(artifact).second) {
            scenario_fail(origin, "duplicate output artifact '" + artifact + "'");
        }
    }
    if (scenario.table_precision &&
        (*scenario.table_precision < 0 || *scenario.table_precision > 12)) {
        scenario_fail(origin, "table_precision must be between 0 and 12");
    }
    for (const auto& [h, ratio] : scenario.samples) {
        if (!std::isfinite(h) || !(h > 0.0) || !std::isfinite(ratio)) {
            scenario_fail(origin, "samples need positive finite h and finite ratio");
        }
    }
    for (std::size_t i = 0; i < scenario.corrections.size(); ++i) {
        const auto& [h, tau] = scenario.corrections[i];
        if (!std::isfinite(h) || !(h > 0.0) || !std::isfinite(tau)) {
            scenario_fail(origin, "corrections need positive finite h and finite tau");
        }
        for (std::size_t j = i + 1; j < scenario.corrections.size(); ++j) {
            if (scenario.corrections[j].first == h) {
                scenario_fail(origin, "duplicate correction for one h value");
            }
        }
    }
    if (scenario.simulation) {
        const SimulationSpec& sim = *scenario.simulation;
        if (!std::isfinite(sim.h) || !(sim.h > 0.0)) {
            scenario_fail(origin, "simulation.h must be positive");
        }
        if (!std::isfinite(sim.tau) || sim.tau < 0.0) {
            scenario_fail(origin, "simulation.tau must be nonnegative");
        }
        if (static_cast<int>(sim.inputs.size()) < sim.steps) {
            scenario_fail(origin, "simulation.input supplies fewer values than steps");
        }
        const std::size_t want_n = sim.use_benchmark_plant ? 3u : 1u;
        if (!sim.x0.empty() && sim.x0.size() != want_n) {
            scenario_fail(origin, "simulation.x0 has the wrong dimension for the plant");
        }
    }
}

void require_profile_source(const Scenario& scenario) {
    validate(scenario);
    if (scenario.samples.empty() && scenario.profile_csv.empty()) {
        fail(errc::bad_input, "scenario '" + scenario.name +
                                  "': needs inline samples or a profile_csv path");
    }
    try {
        delayopt::validate(scenario.gains);
    } catch (const error& e) {
        fail(errc::bad_input, "scenario '" + scenario.name + "' gains: " + e.what());
    }
}

bool wants_output(const Scenario& scenario, const std::string& artifact) {
    if (!scenario.outputs_declared) {
        return true;  // no filter declared: emit everything the command produces
    }
    return std::find(scenario.outputs.begin(), scenario.outputs.end(), artifact) !=
           scenario.outputs.end();
}

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(errc::bad_input, "scenario " + origin + ": " + e.what());
    }
    if (!root.is_object()) {
        scenario_fail(origin, "top level must be an object");
    }
    check_keys(root,
               {"name", "gains", "samples", "profile_csv", "table_precision", "corrections",
                "outputs", "notes", "reference", "simulation"},
               "scenario", origin);

    Scenario s;
    try {
        s.name = member(root, "name", origin).get<std::string>();

        if (root.contains("gains")) {
            const json& g = root["gains"];
            check_keys(g, {"A", "B", "k"}, "gains", origin);
            s.gains.A = number_at(g, "A", origin);
            s.gains.B = number_at(g, "B", origin);
            s.gains.k = number_at(g, "k", origin);
        }
        if (root.contains("samples")) {
            s.samples = pair_list(root["samples"], "samples", origin);
            s.samples_declared = true;
        }
        if (root.contains("profile_csv")) {
            s.profile_csv = root["profile_csv"].get<std::string>();
        }
        if (root.contains("table_precision")) {
            if (!root["table_precision"].is_number_integer()) {
                scenario_fail(origin, "table_precision must be an integer");
            }
            s.table_precision = root["table_precision"].get<int>();
        }
        if (root.contains("corrections")) {
            s.corrections = pair_list(root["corrections"], "corrections", origin);
        }
        if (root.contains("outputs")) {
            s.outputs = string_list(root["outputs"], "outputs", origin);
            s.outputs_declared = true;
        }
        if (root.contains("notes")) {
            s.notes = string_list(root["notes"], "notes", origin);
        }
        if (root.contains("reference")) {
            s.reference = parse_reference(root["reference"], origin);
        }
        if (root.contains("simulation")) {
            s.simulation = parse_simulation(root["simulation"], origin);
        }
    } catch (const json::exception& e) {
        scenario_fail(origin, e.what());
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(errc::usage, "cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), "'" + path + "'");
}

namespace {

const std::string kCase1 = R"json({
  "name": "case1",
  "gains": {"A": -6.0, "B": 6.0, "k": 32.0},
  "samples": [[0.001, 26.0], [0.002, 23.0], [0.003, 20.0], [0.004, 18.0], [0.005, 16.0]],
  "table_precision": 3,
  "corrections": [[0.003, 0.026], [0.005, 0.108]],
  "outputs": ["profile", "corrected", "fit", "vertex", "evaluated", "plot"],
  "notes": [
    "the h=0.003 correction keeps the quoted override 0.026; two-sided interpolation of its neighbors gives 0.042, and the correction stage reports both values",
    "the h=0.005 row is overridden to 0.108: the corrected reference column quotes 0.108 where the uncorrected column quotes 0.107, and recomputation gives 0.10650"
  ],
  "reference": {
    "profile_tau": [0.118, 0.034, 0.078, 0.05, 0.107],
    "corrected_tau": [0.118, 0.034, 0.026, 0.05, 0.108],
    "coefficients": {
      "a": 0.23, "b": -136.0, "c": 22571.0,
      "a_decimals": 2, "b_decimals": 0, "c_decimals": 0,
      "notes": [
        "the quadratic is quoted once with an h^2 coefficient of 2257; the accompanying derivative slope 45142 h = 2 * 22571 h and the evaluated table identify 22571 as the intended curvature"
      ]
    },
    "vertex": {"h": 0.003, "tau": 0.025},
    "evaluated_tau": [0.117, 0.048, 0.025, null, 0.114],
    "known_discrepancies": [
      {
        "stage": "profile",
        "h": 0.005,
        "computed": 0.106496992517,
        "published": 0.107,
        "note": "recomputing this row gives 0.106497, which prints as 0.106; the quoted 0.107 would need a ratio near 16.037 rather than the stated 16, and the corrected reference column quotes 0.108 for the same row"
      }
    ]
  }
})json";

const std::string kCase2 = R"json({
  "name": "case2",
  "gains": {"A": -11.0, "B": 6.0, "k": 32.0},
  "samples": [[0.001, 12.0], [0.002, 10.0], [0.003, 8.5], [0.004, 7.0], [0.005, 6.0]],
  "table_precision": 3,
  "corrections": [[0.004, 0.063]],
  "outputs": ["profile", "corrected", "fit", "vertex", "evaluated", "plot"],
  "notes": [
    "the corrected h=0.004 row is quoted as 0.063; two-sided interpolation of the quoted neighbors gives 0.0635, exactly half a print unit away, so the quoted value is carried as an explicit override and the interpolation is reported alongside"
  ],
  "reference": {
    "profile_tau": [0.109, 0.059, 0.019, 0.085, 0.108],
    "corrected_tau": [0.109, 0.059, 0.019, 0.063, 0.108],
    "coefficients": {
      "a": 0.21, "b": -117.23, "c": 19571.0,
      "a_decimals": 2, "b_decimals": 2, "c_decimals": 0,
      "notes": [
        "the quoted derivative slope 3914 h is inconsistent with the quoted curvature; 2 * 19571 h = 39142 h (39142.86 h for the refitted curvature) identifies the intended slope"
      ]
    },
    "vertex": {"h": 0.003, "tau": 0.034},
    "evaluated_tau": [0.113, 0.054, 0.034, 0.054, 0.113],
    "known_discrepancies": []
  }
})json";

}  // namespace

const std::string& embedded_scenario(const std::string& case_name) {
    if (case_name == "case1") return kCase1;
    if (case_name == "case2") return kCase2;
    fail(errc::usage, "unknown case '" + case_name + "' (expected case1 or case2)");
}

}  // namespace delayopt::cli
