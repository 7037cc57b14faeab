#pragma once

#include "delayopt/types.hpp"

namespace delayopt {

// An observed operating condition of the scalar loop: sampling period h and
// the state-to-input ratio rho = x/u measured at loop execution k.
struct OperatingPoint {
    ScalarLoopGains gains;
    double h = 0.0;
    double ratio = 0.0;
};

// Recovers the control delay from the ratio by inverting the closed-form loop
// relation:
//
//   tau = -(1/A) ln(L),  L = (A/B) e^{-Ah} (k - k e^{Ah} + 1) rho + k e^{-Ah} + 1
//
// (the trailing +1 sits inside the logarithm). L <= 0 is a domain error
// carrying L and the domain bound. tau <= 0 is returned with a
// `nonpositive_delay` warning: the boundary and slightly-super-critical
// ratios are meaningful when probing the admissibility frontier.
double delay_from_ratio(const OperatingPoint& pt, WarningList* warnings = nullptr);

// Exact algebraic inverse of delay_from_ratio:
//
//   rho = (e^{-A tau} - k e^{-Ah} - 1) / ((A/B) e^{-Ah} (k - k e^{Ah} + 1))
//
// At tau = 0 this returns exactly max_admissible_ratio.
double ratio_from_delay(const ScalarLoopGains& gains, double h, double tau);

// Largest ratio for which the recovered delay is positive; the recovered
// delay is exactly zero at the bound:
//
//   rho_max = (B/A) (-k) / (1 + k - k e^{Ah})
double max_admissible_ratio(const ScalarLoopGains& gains, double h);

// Where the logarithm's domain actually ends (L = 0) — strictly weaker than
// the admissibility bound. Ratios between the two invert to a finite negative
// delay; ratios at or beyond this one have no finite inverse.
double exact_domain_ratio(const ScalarLoopGains& gains, double h);

}  // namespace delayopt
