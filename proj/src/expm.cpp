#include "delayopt/discretize.hpp"

#include <cmath>

namespace delayopt {

namespace {

// Infinity norm kept local; Eigen's lpNorm<Infinity> on the matrix flattens
// to max |entry|, we want the induced (max row sum) norm for the series bound.
double inf_norm(const Eigen::MatrixXd& M) {
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

void require_finite_square(const Eigen::MatrixXd& M, const char* what) {
    if (M.rows() != M.cols()) {
        fail(errc::out_of_domain, std::string(what) + ": matrix must be square");
    }
    if (!M.allFinite()) {
        fail(errc::out_of_domain, std::string(what) + ": matrix has non-finite entries");
    }
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t) {
    require_finite_square(M, "expm");
    if (!std::isfinite(t)) {
        fail(errc::out_of_domain, "expm: t is not finite");
    }

    const auto n = M.rows();
    Eigen::MatrixXd N = M * t;
    const double norm = inf_norm(N);
    if (!std::isfinite(norm)) {
        fail(errc::numeric_failure, "expm: scaled matrix overflowed");
    }

    // Halve until the norm is at most 0.5, then the plain series converges to
    // machine precision in ~20 terms; undo by repeated squaring.
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        N /= std::exp2(squarings);
    }

    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        term = (term * N) / static_cast<double>(k);
        sum += term;
        if (inf_norm(term) <= 1e-18 * inf_norm(sum)) {
            break;
        }
    }

    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    if (!sum.allFinite()) {
        fail(errc::numeric_failure, "expm: result is not finite");
    }
    return sum;
}

Eigen::MatrixXd integrate_expm(const Eigen::MatrixXd& A, double t) {
    require_finite_square(A, "integrate_expm");
    const auto n = A.rows();

    // exp([[A, I], [0, 0]] t) = [[e^{At}, int_0^t e^{As} ds], [0, I]]
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = A;
    block.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd E = expm(block, t);
    return E.topRightCorner(n, n);
}

}  // namespace delayopt
