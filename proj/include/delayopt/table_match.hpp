#pragma once

#include <cmath>
#include <cstdint>

namespace delayopt {

// Comparison semantics for reproducing printed tables. Values are compared on
// an integer grid a thousand times finer than the print precision, which
// keeps decimal statements ("0.0635 matches 0.063 at 3 decimals") exact
// instead of hostage to binary64 representation of decimal literals.

inline std::int64_t decimal_ticks(double x, int decimals, int extra = 3) {
    return std::llround(x * std::pow(10.0, decimals + extra));
}

// Round to `decimals` places, halves away from zero.
inline double round_decimals(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::llround(x * scale) / scale;
}

// True when x prints as `target` at the given precision.
inline bool rounds_to(double x, double target, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::llround(x * scale) == std::llround(target * scale);
}

// True when |x - target| is within half an ULP of the last printed decimal,
// boundary inclusive (e.g. 0.0635 vs 0.063 at 3 decimals).
inline bool within_print_precision(double x, double target, int decimals) {
    const auto dx = decimal_ticks(x, decimals) - decimal_ticks(target, decimals);
    return std::llabs(dx) <= 500;
}

}  // namespace delayopt
