#pragma once

#include <vector>

#include "delayopt/types.hpp"

namespace delayopt {

// e^{Mt} by scaling-and-squaring with a truncated-series core. The input is
// scaled by a power of two until its infinity norm is at most 0.5, the series
// is summed to machine precision, and the result squared back up. Accurate to
// ~1e-12 relative for ||M t|| <= 10.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t);

// int_0^t e^{As} ds, evaluated through the exponential of the augmented block
// matrix [[A, I], [0, 0]] — valid for singular A, no inverse involved.
Eigen::MatrixXd integrate_expm(const Eigen::MatrixXd& A, double t);

// One-period delayed ZOH discretization of the scalar loop. tau may exceed h
// (the closed forms stay well defined); that case carries a
// `delay_exceeds_period` warning since the one-period recursion stops being a
// faithful model of the loop. tau < 0 or h <= 0 is a domain error.
ScalarDiscretization discretize_scalar_delayed(const ScalarLoopGains& gains, double h, double tau,
                                               WarningList* warnings = nullptr);

// Matrix form. Requires 0 <= tau <= h (single-period assumption is structural
// here). The Gamma integrals are evaluated via the augmented exponential.
MatrixDiscretization discretize_matrix_delayed(const StateSpacePlant& plant, double h, double tau);

// x(kh+h) = phi x + gamma0 u_now + gamma1 u_prev.
double step_delayed(const ScalarDiscretization& disc, double x, double u_now, double u_prev);
Eigen::VectorXd step_delayed(const MatrixDiscretization& disc, const Eigen::VectorXd& x,
                             double u_now, double u_prev);

// Independent check on the one-step recursion: propagate x under the previous
// command for tau seconds, then under the current command for h - tau, each
// leg a plain zero-delay ZOH segment. Agrees with step_delayed to roundoff.
double oracle_two_segment_step(const ScalarLoopGains& gains, double h, double tau, double x,
                               double u_now, double u_prev);
Eigen::VectorXd oracle_two_segment_step(const StateSpacePlant& plant, double h, double tau,
                                        const Eigen::VectorXd& x, double u_now, double u_prev);

struct TrajectoryPoint {
    double t = 0.0;  // k*h, integer multiples — never accumulated
    Eigen::VectorXd x;
    double y = 0.0;  // C x + D u at this point
    double u = 0.0;  // command applied over [t, t+h)
};

struct ScalarTrajectoryPoint {
    double t = 0.0;
    double x = 0.0;
    double u = 0.0;
};

// Iterate the delayed recursion for `steps` periods. inputs supplies u(kh) for
// k = 0..steps-1 (at least `steps` entries); u(-h) defaults to u_prev0. The
// trajectory has steps+1 points; the terminal point reports the next command
// when supplied and otherwise holds the last one. A non-finite state aborts
// with a divergence error naming the step.
std::vector<TrajectoryPoint> simulate(const StateSpacePlant& plant, double h, double tau,
                                      const Eigen::VectorXd& x0, const std::vector<double>& inputs,
                                      int steps, double u_prev0 = 0.0);
std::vector<ScalarTrajectoryPoint> simulate(const ScalarLoopGains& gains, double h, double tau,
                                            double x0, const std::vector<double>& inputs, int steps,
                                            double u_prev0 = 0.0, WarningList* warnings = nullptr);

}  // namespace delayopt
