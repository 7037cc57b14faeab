#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delayopt/delay_inversion.hpp"
#include "delayopt/types.hpp"

namespace delayopt {

// Provenance of a row's tau value.
enum class RowSource {
    computed,         // inverted from a (h, ratio) sample
    measured,         // supplied externally, no ratio attached
    interpolated,     // replaced by neighbor linear interpolation
    manual_override,  // replaced by an explicitly supplied value
};

std::string_view to_string(RowSource s);
RowSource row_source_from(std::string_view text);

struct ProfileRow {
    double h = 0.0;
    std::optional<double> ratio;  // absent for measured rows
    double tau = 0.0;
    bool corrected = false;  // true iff source is interpolated or manual_override
    RowSource source = RowSource::computed;
};

// Rows strictly increasing in h. gains are carried when the taus were
// computed from (h, ratio) samples, absent for purely measured tables.
struct ProfileTable {
    std::optional<ScalarLoopGains> gains;
    std::vector<ProfileRow> rows;
};

void validate(const ProfileTable& table);

// One row per (h, ratio) sample, tau from delay_from_ratio, sorted by h.
// An empty sample list yields an empty table. Out-of-domain ratios fail with
// the offending h named; nonpositive-delay warnings are forwarded.
ProfileTable build_profile(const ScalarLoopGains& gains,
                           const std::vector<std::pair<double, double>>& samples,
                           WarningList* warnings = nullptr);

// Flags interior rows sitting anomalously far ABOVE the chord of their
// neighbors: residual r_i = max(tau_i - lininterp(h_i), 0), flagged when
// r_i > threshold_factor * median(all interior r_j). The profiles this tool
// corrects spike upward — a one-sided residual separates the spike cleanly
// while leaving smooth tables (where residuals are all equal) untouched.
// Returned indices are ordered by descending residual, ties by ascending
// index. Needs at least 3 rows.
std::vector<int> detect_irregular(const ProfileTable& table, double threshold_factor = 1.5);

// The value the correction rule would assign to `index`: linear interpolation
// between its nearest non-flagged neighbors on each side.
double neighbor_interpolation(const ProfileTable& table, int index,
                              const std::vector<int>& flagged);

// Replaces each flagged row's tau by its neighbor interpolation
// (source=interpolated), or by an override value when one is supplied for its
// h (source=manual_override). Flagged endpoints are an error — there is no
// two-sided neighborhood to interpolate from. Every other row is returned
// bit-identical. Override keys must match a row.
ProfileTable correct_piecewise(const ProfileTable& table, const std::vector<int>& indices,
                               const std::map<double, double>& overrides = {});

// CSV: header `h,ratio,tau,corrected,source`, numeric fields at 17
// significant digits (exact double round-trip), empty ratio allowed, LF line
// endings.
void save_profile_csv(const ProfileTable& table, std::ostream& out);
void save_profile_csv(const ProfileTable& table, const std::string& path);
ProfileTable load_profile_csv(std::istream& in);
ProfileTable load_profile_csv(const std::string& path);

}  // namespace delayopt
