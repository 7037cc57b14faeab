// Python bindings for the delayopt core: delay profiles, ratio/delay
// inversion, outlier correction, quadratic sampling-period optimization, and
// delayed-ZOH simulation. Matrix results are returned as plain tuples/lists
// so the module has no third-party Python dependencies.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "delayopt/delay_inversion.hpp"
#include "delayopt/discretize.hpp"
#include "delayopt/errors.hpp"
#include "delayopt/profile.hpp"
#include "delayopt/quadfit.hpp"

namespace py = pybind11;
using namespace delayopt;

namespace {

ProfileTable measured_profile(const std::vector<std::pair<double, double>>& rows) {
    ProfileTable table;
    for (const auto& [h, tau] : rows) {
        ProfileRow row;
        row.h = h;
        row.tau = tau;
        row.source = RowSource::measured;
        table.rows.push_back(row);
    }
    validate(table);
    return table;
}

}  // namespace

PYBIND11_MODULE(_delayopt, m) {
    m.doc() = "Sampled-data control delay toolkit: measure how control delay varies with "
              "the sampling period, correct irregular measurements, and locate the "
              "delay-minimizing sampling period.";

    py::register_exception<error>(m, "ToolkitError");

    py::class_<ScalarLoopGains>(m, "ScalarLoopGains",
                                "Scalar loop parameters: feedback factor A (negative), input "
                                "gain B (nonzero), executions-per-period count k.")
        .def(py::init([](double A, double B, double k) {
                 ScalarLoopGains g{A, B, k};
                 validate(g);
                 return g;
             }),
             py::arg("A"), py::arg("B"), py::arg("k"))
        .def_readonly("A", &ScalarLoopGains::A)
        .def_readonly("B", &ScalarLoopGains::B)
        .def_readonly("k", &ScalarLoopGains::k)
        .def("__repr__", [](const ScalarLoopGains& g) {
            return "ScalarLoopGains(A=" + std::to_string(g.A) + ", B=" + std::to_string(g.B) +
                   ", k=" + std::to_string(g.k) + ")";
        });

    py::class_<ScalarDiscretization>(m, "ScalarDiscretization",
                                     "One-period delayed ZOH recursion "
                                     "x+ = phi x + gamma0 u_now + gamma1 u_prev.")
        .def_readonly("phi", &ScalarDiscretization::phi)
        .def_readonly("gamma0", &ScalarDiscretization::gamma0)
        .def_readonly("gamma1", &ScalarDiscretization::gamma1)
        .def_readonly("h", &ScalarDiscretization::h)
        .def_readonly("tau", &ScalarDiscretization::tau);

    py::class_<ProfileRow>(m, "ProfileRow")
        .def_readonly("h", &ProfileRow::h)
        .def_readonly("ratio", &ProfileRow::ratio)
        .def_readonly("tau", &ProfileRow::tau)
        .def_readonly("corrected", &ProfileRow::corrected)
        .def_property_readonly(
            "source", [](const ProfileRow& r) { return std::string(to_string(r.source)); })
        .def("__repr__", [](const ProfileRow& r) {
            return "ProfileRow(h=" + std::to_string(r.h) + ", tau=" + std::to_string(r.tau) +
                   ", source=" + std::string(to_string(r.source)) + ")";
        });

    py::class_<ProfileTable>(m, "ProfileTable", "Delay-vs-sampling-period rows, ascending in h.")
        .def_readonly("rows", &ProfileTable::rows)
        .def("taus",
             [](const ProfileTable& t) {
                 std::vector<double> out;
                 for (const ProfileRow& r : t.rows) out.push_back(r.tau);
                 return out;
             })
        .def("__len__", [](const ProfileTable& t) { return t.rows.size(); });

    py::class_<QuadraticModel>(m, "QuadraticModel",
                               "Least-squares tau(h) = a + b h + c h^2 with its SSE.")
        .def_readonly("a", &QuadraticModel::a)
        .def_readonly("b", &QuadraticModel::b)
        .def_readonly("c", &QuadraticModel::c)
        .def_readonly("sse", &QuadraticModel::sse)
        .def_readonly("n_points", &QuadraticModel::n_points)
        .def("__repr__", [](const QuadraticModel& q) {
            return "QuadraticModel(a=" + std::to_string(q.a) + ", b=" + std::to_string(q.b) +
                   ", c=" + std::to_string(q.c) + ")";
        });

    py::class_<OptimalPoint>(m, "OptimalPoint")
        .def_readonly("h_star", &OptimalPoint::h_star)
        .def_readonly("tau_star", &OptimalPoint::tau_star)
        .def("__repr__", [](const OptimalPoint& p) {
            return "OptimalPoint(h_star=" + std::to_string(p.h_star) +
                   ", tau_star=" + std::to_string(p.tau_star) + ")";
        });

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("model", &OptimizationResult::model)
        .def_readonly("optimum", &OptimizationResult::optimum)
        .def_readonly("evaluated", &OptimizationResult::evaluated);

    // ---- inversion ----
    m.def(
        "delay_from_ratio",
        [](const ScalarLoopGains& gains, double h, double ratio) {
            return delay_from_ratio({gains, h, ratio});
        },
        py::arg("gains"), py::arg("h"), py::arg("ratio"),
        "Recover the control delay from a state-to-input ratio observation.");
    m.def("ratio_from_delay", &ratio_from_delay, py::arg("gains"), py::arg("h"), py::arg("tau"),
          "Exact inverse of delay_from_ratio.");
    m.def("max_admissible_ratio", &max_admissible_ratio, py::arg("gains"), py::arg("h"),
          "Largest ratio whose recovered delay is nonnegative.");
    m.def("exact_domain_ratio", &exact_domain_ratio, py::arg("gains"), py::arg("h"),
          "Ratio at which the inversion's logarithm runs out of domain.");

    // ---- discretization & simulation ----
    m.def(
        "discretize_scalar",
        [](const ScalarLoopGains& gains, double h, double tau) {
            return discretize_scalar_delayed(gains, h, tau);
        },
        py::arg("gains"), py::arg("h"), py::arg("tau"),
        "Delayed one-period ZOH discretization of the scalar loop.");
    m.def(
        "step",
        [](const ScalarDiscretization& disc, double x, double u_now, double u_prev) {
            return step_delayed(disc, x, u_now, u_prev);
        },
        py::arg("disc"), py::arg("x"), py::arg("u_now"), py::arg("u_prev"),
        "Advance the delayed recursion one period.");
    m.def(
        "simulate_loop",
        [](const ScalarLoopGains& gains, double h, double tau, double x0,
           const std::vector<double>& inputs, int steps, double u_prev0) {
            const auto trajectory = simulate(gains, h, tau, x0, inputs, steps, u_prev0);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : trajectory) out.emplace_back(p.t, p.x, p.u);
            return out;
        },
        py::arg("gains"), py::arg("h"), py::arg("tau"), py::arg("x0"), py::arg("inputs"),
        py::arg("steps"), py::arg("u_prev0") = 0.0,
        "Iterate the scalar loop; returns (t, x, u) tuples.");
    m.def(
        "simulate_benchmark",
        [](double h, double tau, const std::vector<double>& inputs, int steps,
           const std::vector<double>& x0, double u_prev0) {
            const StateSpacePlant plant = benchmark_plant();
            Eigen::VectorXd state = Eigen::VectorXd::Zero(plant.n());
            if (!x0.empty()) {
                if (static_cast<Eigen::Index>(x0.size()) != plant.n()) {
                    fail(errc::bad_input, "x0 must have " + std::to_string(plant.n()) +
                                              " entries, got " + std::to_string(x0.size()));
                }
                for (std::size_t i = 0; i < x0.size(); ++i) {
                    state(static_cast<Eigen::Index>(i)) = x0[i];
                }
            }
            const auto trajectory = simulate(plant, h, tau, state, inputs, steps, u_prev0);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : trajectory) out.emplace_back(p.t, p.y, p.u);
            return out;
        },
        py::arg("h"), py::arg("tau"), py::arg("inputs"), py::arg("steps"),
        py::arg("x0") = std::vector<double>{}, py::arg("u_prev0") = 0.0,
        "Simulate the third-order benchmark plant under delayed ZOH; returns "
        "(t, y, u) tuples.");

    // ---- profile building & correction ----
    m.def(
        "build_profile",
        [](const ScalarLoopGains& gains, const std::vector<std::pair<double, double>>& samples) {
            return build_profile(gains, samples);
        },
        py::arg("gains"), py::arg("samples"),
        "Invert each (h, ratio) sample into a delay row, sorted by h.");
    m.def("measured_profile", &measured_profile, py::arg("rows"),
          "Profile table from plain (h, tau) pairs, no ratios attached.");
    m.def("detect_irregular", &detect_irregular, py::arg("table"),
          py::arg("threshold_factor") = 1.5,
          "Indices of interior rows sitting anomalously far above their neighbors' chord, "
          "worst first.");
    m.def("neighbor_interpolation", &neighbor_interpolation, py::arg("table"), py::arg("index"),
          py::arg("flagged"),
          "Two-sided linear interpolation a correction would assign to the row.");
    m.def("correct_piecewise", &correct_piecewise, py::arg("table"), py::arg("indices"),
          py::arg("overrides") = std::map<double, double>{},
          "Replace flagged rows by interpolation, or by override values where supplied.");
    m.def("load_profile_csv",
          static_cast<ProfileTable (*)(const std::string&)>(&load_profile_csv), py::arg("path"));
    m.def("save_profile_csv",
          static_cast<void (*)(const ProfileTable&, const std::string&)>(&save_profile_csv),
          py::arg("table"), py::arg("path"));

    // ---- fitting & optimization ----
    m.def("fit_quadratic", &fit_quadratic, py::arg("points"),
          "Least-squares quadratic through (h, tau) points.");
    m.def("vertex", &vertex, py::arg("model"), "Minimizer of the fitted parabola (needs c > 0).");
    m.def("evaluate_model", &evaluate_model, py::arg("model"), py::arg("h"));
    m.def("optimize_sampling", &optimize_sampling, py::arg("table"),
          "fit -> vertex -> evaluate over the table's h grid.");
}
