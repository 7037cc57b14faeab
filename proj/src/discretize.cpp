#include "delayopt/discretize.hpp"

#include <cmath>
#include <sstream>

namespace delayopt {

namespace {

void note(WarningList* warnings, const char* code, std::string msg) {
    if (warnings != nullptr) {
        warnings->push_back({code, std::move(msg)});
    }
}

// (e^{As} - 1) / A scaled by B, i.e. the one-segment ZOH input gain. expm1
// evaluates e^x - 1 without cancellation, so the expression stays accurate
// down to |A s| ~ 0 (it degrades gracefully to B*s for a marginal plant).
double zoh_gain(double A, double B, double s) {
    return (B / A) * std::expm1(A * s);
}

}  // namespace

void validate(const ScalarLoopGains& g) {
    if (!(std::isfinite(g.A) && std::isfinite(g.B) && std::isfinite(g.k))) {
        fail(errc::out_of_domain, "loop gains must be finite");
    }
    if (!(g.A < 0.0)) {
        fail(errc::out_of_domain, "feedback transmission factor A must be negative");
    }
    if (g.B == 0.0) {
        fail(errc::out_of_domain, "input gain B must be nonzero");
    }
    if (g.k < 0.0) {
        fail(errc::out_of_domain, "loop execution count k must be nonnegative");
    }
}

void validate(const StateSpacePlant& p) {
    const auto n = p.A.rows();
    if (n < 1 || p.A.cols() != n) {
        fail(errc::out_of_domain, "plant: A must be square with n >= 1");
    }
    if (p.B.rows() != n || p.C.cols() != n) {
        fail(errc::out_of_domain, "plant: B/C dimensions inconsistent with A");
    }
    if (!p.A.allFinite() || !p.B.allFinite() || !p.C.allFinite() || !std::isfinite(p.D)) {
        fail(errc::out_of_domain, "plant: entries must be finite");
    }
}

StateSpacePlant benchmark_plant() {
    StateSpacePlant p;
    p.A.resize(3, 3);
    p.A << 0, 1, 0,
           0, 0, 1,
          -6, -11, -6;
    p.B.resize(3);
    p.B << 0, 0, 6;
    p.C.resize(3);
    p.C << 1, 0, 0;
    p.D = 0.0;
    return p;
}

ScalarDiscretization discretize_scalar_delayed(const ScalarLoopGains& gains, double h, double tau,
                                               WarningList* warnings) {
    validate(gains);
    if (!(h > 0.0) || !std::isfinite(h)) {
        fail(errc::out_of_domain, "discretize: sampling period h must be positive");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        fail(errc::out_of_domain, "discretize: delay tau must be nonnegative");
    }
    if (tau > h) {
        std::ostringstream msg;
        msg << "delay tau=" << tau << " exceeds the sampling period h=" << h
            << "; the one-period recursion is evaluated as written but no longer models the loop";
        note(warnings, "delay_exceeds_period", msg.str());
    }

    ScalarDiscretization d;
    d.h = h;
    d.tau = tau;
    d.phi = std::exp(gains.A * h);
    d.gamma0 = zoh_gain(gains.A, gains.B, h - tau);
    // (B/A) e^{Ah} (1 - e^{-A tau}) = -(B/A) e^{Ah} expm1(-A tau); exact zero at tau = 0
    d.gamma1 = -(gains.B / gains.A) * d.phi * std::expm1(-gains.A * tau);
    return d;
}

MatrixDiscretization discretize_matrix_delayed(const StateSpacePlant& plant, double h, double tau) {
    validate(plant);
    if (!(h > 0.0) || !std::isfinite(h)) {
        fail(errc::out_of_domain, "discretize: sampling period h must be positive");
    }
    if (!(tau >= 0.0 && tau <= h)) {
        std::ostringstream msg;
        msg << "discretize: matrix path requires 0 <= tau <= h, got tau=" << tau << ", h=" << h;
        fail(errc::out_of_domain, msg.str());
    }

    MatrixDiscretization d;
    d.h = h;
    d.tau = tau;
    d.phi = expm(plant.A, h);
    d.gamma0 = integrate_expm(plant.A, h - tau) * plant.B;
    // int_{h-tau}^{h} e^{As} ds = e^{A(h-tau)} int_0^{tau} e^{As} ds
    d.gamma1 = expm(plant.A, h - tau) * (integrate_expm(plant.A, tau) * plant.B);
    return d;
}

double step_delayed(const ScalarDiscretization& disc, double x, double u_now, double u_prev) {
    return disc.phi * x + disc.gamma0 * u_now + disc.gamma1 * u_prev;
}

Eigen::VectorXd step_delayed(const MatrixDiscretization& disc, const Eigen::VectorXd& x,
                             double u_now, double u_prev) {
    if (x.rows() != disc.phi.rows()) {
        fail(errc::out_of_domain, "step: state dimension does not match the discretization");
    }
    return disc.phi * x + disc.gamma0 * u_now + disc.gamma1 * u_prev;
}

double oracle_two_segment_step(const ScalarLoopGains& gains, double h, double tau, double x,
                               double u_now, double u_prev) {
    validate(gains);
    if (!(h > 0.0) || !(tau >= 0.0 && tau <= h)) {
        fail(errc::out_of_domain, "two-segment oracle requires 0 <= tau <= h");
    }
    const auto segment = [&](double state, double u, double dt) {
        return std::exp(gains.A * dt) * state + zoh_gain(gains.A, gains.B, dt) * u;
    };
    const double x_switch = segment(x, u_prev, tau);
    return segment(x_switch, u_now, h - tau);
}

Eigen::VectorXd oracle_two_segment_step(const StateSpacePlant& plant, double h, double tau,
                                        const Eigen::VectorXd& x, double u_now, double u_prev) {
    validate(plant);
    if (!(h > 0.0) || !(tau >= 0.0 && tau <= h)) {
        fail(errc::out_of_domain, "two-segment oracle requires 0 <= tau <= h");
    }
    const auto segment = [&](const Eigen::VectorXd& state, double u, double dt) -> Eigen::VectorXd {
        return expm(plant.A, dt) * state + integrate_expm(plant.A, dt) * plant.B * u;
    };
    const Eigen::VectorXd x_switch = segment(x, u_prev, tau);
    return segment(x_switch, u_now, h - tau);
}

namespace {

// Shared input-sequencing rules for both simulate overloads.
void check_sim_args(std::size_t n_inputs, int steps) {
    if (steps < 0) {
        fail(errc::out_of_domain, "simulate: step count must be nonnegative");
    }
    if (n_inputs < static_cast<std::size_t>(steps)) {
        std::ostringstream msg;
        msg << "simulate: " << steps << " steps need at least " << steps << " inputs, got "
            << n_inputs;
        fail(errc::insufficient_data, msg.str());
    }
}

// Command reported for trajectory point k (the input in effect from t = k h on).
double input_at(const std::vector<double>& inputs, int k, int steps, double u_prev0) {
    if (k < steps) {
        return inputs[static_cast<std::size_t>(k)];
    }
    if (static_cast<std::size_t>(k) < inputs.size()) {
        return inputs[static_cast<std::size_t>(k)];
    }
    if (steps > 0) {
        return inputs[static_cast<std::size_t>(steps) - 1];
    }
    return inputs.empty() ? u_prev0 : inputs.front();
}

}  // namespace

std::vector<TrajectoryPoint> simulate(const StateSpacePlant& plant, double h, double tau,
                                      const Eigen::VectorXd& x0, const std::vector<double>& inputs,
                                      int steps, double u_prev0) {
    check_sim_args(inputs.size(), steps);
    if (x0.rows() != plant.A.rows()) {
        fail(errc::out_of_domain, "simulate: initial state dimension does not match the plant");
    }
    const MatrixDiscretization disc = discretize_matrix_delayed(plant, h, tau);

    std::vector<TrajectoryPoint> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    Eigen::VectorXd x = x0;
    for (int k = 0; k <= steps; ++k) {
        const double u = input_at(inputs, k, steps, u_prev0);
        out.push_back({k * h, x, plant.C.dot(x) + plant.D * u, u});
        if (k == steps) {
            break;
        }
        const double u_prev = (k == 0) ? u_prev0 : inputs[static_cast<std::size_t>(k) - 1];
        x = step_delayed(disc, x, inputs[static_cast<std::size_t>(k)], u_prev);
        if (!x.allFinite()) {
            std::ostringstream msg;
            msg << "simulate: state diverged (non-finite) at step " << k + 1;
            fail(errc::numeric_failure, msg.str());
        }
    }
    return out;
}

std::vector<ScalarTrajectoryPoint> simulate(const ScalarLoopGains& gains, double h, double tau,
                                            double x0, const std::vector<double>& inputs, int steps,
                                            double u_prev0, WarningList* warnings) {
    check_sim_args(inputs.size(), steps);
    const ScalarDiscretization disc = discretize_scalar_delayed(gains, h, tau, warnings);

    std::vector<ScalarTrajectoryPoint> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    double x = x0;
    for (int k = 0; k <= steps; ++k) {
        out.push_back({k * h, x, input_at(inputs, k, steps, u_prev0)});
        if (k == steps) {
            break;
        }
        const double u_prev = (k == 0) ? u_prev0 : inputs[static_cast<std::size_t>(k) - 1];
        x = step_delayed(disc, x, inputs[static_cast<std::size_t>(k)], u_prev);
        if (!std::isfinite(x)) {
            std::ostringstream msg;
            msg << "simulate: state diverged (non-finite) at step " << k + 1;
            fail(errc::numeric_failure, msg.str());
        }
    }
    return out;
}

}  // namespace delayopt
