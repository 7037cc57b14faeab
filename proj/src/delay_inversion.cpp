#include "delayopt/delay_inversion.hpp"

#include <cmath>
#include <sstream>

namespace delayopt {

namespace {

// Shared pieces of the inversion algebra, computed once per call so the
// boundary identities hold bitwise across the four operations:
//   kexp = k e^{-Ah}
//   coeff = (A/B) e^{-Ah} (k - k e^{Ah} + 1)   [the factor multiplying rho]
// k - k e^{Ah} is evaluated as -k expm1(Ah) to stay exact for tiny |Ah|.
struct InversionKernel {
    double kexp;
    double coeff;
};

InversionKernel kernel(const ScalarLoopGains& g, double h) {
    validate(g);
    if (!(h > 0.0) || !std::isfinite(h)) {
        fail(errc::out_of_domain, "sampling period h must be positive");
    }
    const double loop_term = 1.0 - g.k * std::expm1(g.A * h);  // k - k e^{Ah} + 1
    if (loop_term == 0.0) {
        fail(errc::degenerate, "degenerate loop: k - k e^{Ah} + 1 vanishes");
    }
    const double decay = std::exp(-g.A * h);  // e^{-Ah}
    InversionKernel kr;
    kr.kexp = g.k * decay;
    kr.coeff = (g.A / g.B) * decay * loop_term;
    if (kr.coeff == 0.0 || !std::isfinite(kr.coeff)) {
        fail(errc::degenerate, "degenerate loop: ratio coefficient is zero or non-finite");
    }
    return kr;
}

}  // namespace

double delay_from_ratio(const OperatingPoint& pt, WarningList* warnings) {
    const InversionKernel kr = kernel(pt.gains, pt.h);
    if (!std::isfinite(pt.ratio)) {
        fail(errc::out_of_domain, "ratio must be finite");
    }

    const double L = kr.coeff * pt.ratio + kr.kexp + 1.0;
    if (!(L > 0.0)) {
        std::ostringstream msg;
        msg << "ratio " << pt.ratio << " is outside the inversion domain: log argument L=" << L
            << " is not positive (domain bound " << (-(kr.kexp + 1.0) / kr.coeff)
            << ", admissibility bound " << (-kr.kexp / kr.coeff) << ")";
        fail(errc::out_of_domain, msg.str());
    }

    const double tau = -std::log(L) / pt.gains.A;
    if (tau <= 0.0 && warnings != nullptr) {
        std::ostringstream msg;
        msg << "recovered delay " << tau << " is not positive: ratio " << pt.ratio
            << " sits at or beyond the admissibility bound " << (-kr.kexp / kr.coeff);
        warnings->push_back({"nonpositive_delay", msg.str()});
    }
    return tau;
}

double ratio_from_delay(const ScalarLoopGains& gains, double h, double tau) {
    const InversionKernel kr = kernel(gains, h);
    if (!std::isfinite(tau)) {
        fail(errc::out_of_domain, "delay tau must be finite");
    }
    // e^{-A tau} - k e^{-Ah} - 1 = expm1(-A tau) - k e^{-Ah}; the expm1 form
    // collapses to exactly -k e^{-Ah} at tau = 0, which makes the boundary
    // identity ratio_from_delay(..., 0) == max_admissible_ratio exact.
    return (std::expm1(-gains.A * tau) - kr.kexp) / kr.coeff;
}

double max_admissible_ratio(const ScalarLoopGains& gains, double h) {
    const InversionKernel kr = kernel(gains, h);
    return -kr.kexp / kr.coeff;  // L = 1 here, so the recovered delay is exactly 0
}

double exact_domain_ratio(const ScalarLoopGains& gains, double h) {
    const InversionKernel kr = kernel(gains, h);
    return -(kr.kexp + 1.0) / kr.coeff;  // L = 0: the logarithm's domain edge
}

}  // namespace delayopt
