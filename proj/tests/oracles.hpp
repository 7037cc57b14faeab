#pragma once

// Test-only oracles, deliberately built on different math than the library:
// the eigendecomposition route for the benchmark matrix exponential, and
// composite Simpson quadrature for the input-gain integrals.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace delayopt::testing {

// The benchmark state matrix is the companion form of (s+1)(s+2)(s+3), so its
// eigenvectors are the Vandermonde columns [1, l, l^2]^T for l = -1, -2, -3.
inline const Eigen::Matrix3d& benchmark_eigvec() {
    static const Eigen::Matrix3d V = [] {
        Eigen::Matrix3d m;
        m << 1, 1, 1,
            -1, -2, -3,
             1, 4, 9;
        return m;
    }();
    return V;
}

inline Eigen::Matrix3d benchmark_expm_eigen(double t) {
    const Eigen::Vector3d lambda(-1.0, -2.0, -3.0);
    return benchmark_eigvec() * (lambda * t).array().exp().matrix().asDiagonal() *
           benchmark_eigvec().inverse();
}

// int_0^t e^{As} ds through the same eigendecomposition: diagonal entries
// (e^{l t} - 1) / l.
inline Eigen::Matrix3d benchmark_intexp_eigen(double t) {
    const Eigen::Vector3d lambda(-1.0, -2.0, -3.0);
    Eigen::Vector3d d;
    for (int i = 0; i < 3; ++i) {
        d(i) = std::expm1(lambda(i) * t) / lambda(i);
    }
    return benchmark_eigvec() * d.asDiagonal() * benchmark_eigvec().inverse();
}

// Composite Simpson rule on [0, t] with an even panel count.
inline double simpson(const std::function<double(double)>& f, double t, int panels = 2000) {
    const double dx = t / panels;
    double acc = f(0.0) + f(t);
    for (int i = 1; i < panels; ++i) {
        acc += f(i * dx) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return acc * dx / 3.0;
}

inline double rel_diff(double a, double b) {
    const double mag = std::max(std::abs(a), std::abs(b));
    return mag == 0.0 ? 0.0 : std::abs(a - b) / mag;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double mag = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return mag == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / mag;
}

}  // namespace delayopt::testing
