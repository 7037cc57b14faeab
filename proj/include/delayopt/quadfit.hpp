#pragma once

#include <utility>
#include <vector>

#include "delayopt/profile.hpp"

namespace delayopt {

// Least-squares quadratic tau(h) = a + b h + c h^2 with its residual sum of
// squares and point count.
struct QuadraticModel {
    double a = 0.0;  // seconds
    double b = 0.0;  // dimensionless
    double c = 0.0;  // 1/seconds
    double sse = 0.0;
    int n_points = 0;
};

// Minimizer of the fitted parabola.
struct OptimalPoint {
    double h_star = 0.0;
    double tau_star = 0.0;
};

// Solves the three normal equations on a centered, millisecond-rescaled
// abscissa and maps the coefficients back. With h ~ 1e-3 s the raw normal
// matrix spans ~12 orders of magnitude; centering keeps the solve
// well-conditioned enough to pin c ~ 2e4 to full precision. Needs >= 3 points
// over >= 3 distinct h values.
QuadraticModel fit_quadratic(const std::vector<std::pair<double, double>>& points);

// h* = -b/(2c), tau* = a - b^2/(4c). Requires c > 0 (an interior minimum).
OptimalPoint vertex(const QuadraticModel& model);

// a + b h + c h^2.
double evaluate_model(const QuadraticModel& model, double h);

struct OptimizationResult {
    QuadraticModel model;
    OptimalPoint optimum;
    std::vector<std::pair<double, double>> evaluated;  // model sampled on the profile's h grid
};

// Convenience composition fit -> vertex -> evaluate over the table's grid.
OptimizationResult optimize_sampling(const ProfileTable& profile);

}  // namespace delayopt
