#include "delayopt/quadfit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace delayopt {

QuadraticModel fit_quadratic(const std::vector<std::pair<double, double>>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) {
        fail(errc::insufficient_data, "quadratic fit needs at least 3 points");
    }
    std::vector<double> hs;
    hs.reserve(points.size());
    for (const auto& [h, tau] : points) {
        (void)tau;
        if (!std::isfinite(h)) {
            fail(errc::out_of_domain, "quadratic fit: abscissa must be finite");
        }
        hs.push_back(h);
    }
    std::sort(hs.begin(), hs.end());
    if (std::unique(hs.begin(), hs.end()) - hs.begin() < 3) {
        fail(errc::degenerate, "quadratic fit is rank deficient: fewer than 3 distinct h values");
    }

    // Solve on u = (h - mean) * 1000 — centered, millisecond scale — then map
    // the coefficients back. On the raw abscissa (h ~ 1e-3 s) the normal
    // matrix spans ~12 orders of magnitude and the curvature coefficient
    // comes out with only a few good digits.
    double mean = 0.0;
    for (const auto& [h, tau] : points) {
        (void)tau;
        mean += h;
    }
    mean /= n;
    const double scale = 1000.0;

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double t0 = 0, t1 = 0, t2 = 0;
    for (const auto& [h, tau] : points) {
        const double u = (h - mean) * scale;
        const double u2 = u * u;
        s1 += u;
        s2 += u2;
        s3 += u2 * u;
        s4 += u2 * u2;
        t0 += tau;
        t1 += u * tau;
        t2 += u2 * tau;
    }

    Eigen::Matrix3d G;
    G << n, s1, s2,
         s1, s2, s3,
         s2, s3, s4;
    Eigen::Vector3d rhs(t0, t1, t2);
    const Eigen::Vector3d sol = G.ldlt().solve(rhs);
    const double alpha = sol(0), beta = sol(1), gamma = sol(2);

    // tau = alpha + beta*u + gamma*u^2 with u = scale*(h - mean)
    QuadraticModel model;
    model.c = gamma * scale * scale;
    model.b = beta * scale - 2.0 * gamma * scale * scale * mean;
    model.a = alpha - beta * scale * mean + gamma * scale * scale * mean * mean;
    model.n_points = n;
    model.sse = 0.0;
    for (const auto& [h, tau] : points) {
        const double r = tau - (model.a + model.b * h + model.c * h * h);
        model.sse += r * r;
    }
    return model;
}

OptimalPoint vertex(const QuadraticModel& model) {
    if (!(model.c > 0.0)) {
        fail(errc::out_of_domain,
             "fitted parabola has no interior minimum (curvature c <= 0)");
    }
    OptimalPoint opt;
    opt.h_star = -model.b / (2.0 * model.c);
    opt.tau_star = model.a - model.b * model.b / (4.0 * model.c);
    return opt;
}

double evaluate_model(const QuadraticModel& model, double h) {
    if (!std::isfinite(h)) {
        fail(errc::out_of_domain, "evaluate_model: h must be finite");
    }
    return model.a + model.b * h + model.c * h * h;
}

OptimizationResult optimize_sampling(const ProfileTable& profile) {
    validate(profile);
    std::vector<std::pair<double, double>> points;
    points.reserve(profile.rows.size());
    for (const ProfileRow& row : profile.rows) {
        points.emplace_back(row.h, row.tau);
    }

    OptimizationResult result;
    result.model = fit_quadratic(points);
    result.optimum = vertex(result.model);
    result.evaluated.reserve(points.size());
    for (const auto& [h, tau] : points) {
        (void)tau;
        result.evaluated.emplace_back(h, evaluate_model(result.model, h));
    }
    return result;
}

}  // namespace delayopt
