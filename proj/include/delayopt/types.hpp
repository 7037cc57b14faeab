#pragma once

#include <Eigen/Dense>

#include "delayopt/errors.hpp"

namespace delayopt {

// Parameters of the scalar control loop: A is the feedback transmission
// factor (1/s, strictly negative — stable negative feedback), B the input
// gain (1/s, nonzero), k the number of control-loop executions entering the
// ratio/delay relation (dimensionless, nonnegative).
struct ScalarLoopGains {
    double A = -1.0;
    double B = 1.0;
    double k = 0.0;
};

void validate(const ScalarLoopGains& g);

// Continuous-time LTI plant dx/dt = A x + B u, y = C x + D u.
struct StateSpacePlant {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;

    Eigen::Index n() const { return A.rows(); }
};

void validate(const StateSpacePlant& p);

// Third-order benchmark plant with poles {-1, -2, -3} and unit DC gain:
//   A = [[0,1,0],[0,0,1],[-6,-11,-6]], B = [0,0,6]^T, C = [1,0,0], D = 0.
StateSpacePlant benchmark_plant();

// One-period discretization of the loop under zero-order hold with an input
// delay tau: the previous command still drives the first tau seconds of the
// period, the current command the remaining h - tau.
//
//   x(kh + h) = phi * x(kh) + gamma0 * u(kh) + gamma1 * u(kh - h)
//
// with phi = e^{Ah}, gamma0 = (B/A)(e^{A(h-tau)} - 1),
// gamma1 = (B/A) e^{Ah} (1 - e^{-A tau}).
struct ScalarDiscretization {
    double phi = 0.0;
    double gamma0 = 0.0;  // weight of the current command
    double gamma1 = 0.0;  // weight of the previous command
    double h = 0.0;
    double tau = 0.0;
};

// Matrix counterpart: Phi = e^{Ah}, Gamma0 = int_0^{h-tau} e^{As} ds B,
// Gamma1 = int_{h-tau}^{h} e^{As} ds B.
struct MatrixDiscretization {
    Eigen::MatrixXd phi;
    Eigen::VectorXd gamma0;
    Eigen::VectorXd gamma1;
    double h = 0.0;
    double tau = 0.0;
};

}  // namespace delayopt
