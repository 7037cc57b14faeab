#include "delayopt/profile.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace delayopt {

namespace {

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

bool same_h(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    std::ostringstream msg;
    msg << "profile CSV, line " << line << ": " << what;
    fail(errc::bad_input, msg.str());
}

}  // namespace

std::string_view to_string(RowSource s) {
    switch (s) {
        case RowSource::computed: return "computed";
        case RowSource::measured: return "measured";
        case RowSource::interpolated: return "interpolated";
        case RowSource::manual_override: return "manual_override";
    }
    fail(errc::out_of_domain, "unknown row source");
}

RowSource row_source_from(std::string_view text) {
    if (text == "computed") return RowSource::computed;
    if (text == "measured") return RowSource::measured;
    if (text == "interpolated") return RowSource::interpolated;
    if (text == "manual_override") return RowSource::manual_override;
    fail(errc::bad_input, "unknown row source '" + std::string(text) + "'");
}

void validate(const ProfileTable& table) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ProfileRow& row = table.rows[i];
        if (!(row.h > 0.0) || !std::isfinite(row.h)) {
            fail(errc::out_of_domain, "profile rows need positive finite h");
        }
        if (!std::isfinite(row.tau)) {
            fail(errc::out_of_domain, "profile rows need finite tau");
        }
        const bool marked = row.source == RowSource::interpolated ||
                            row.source == RowSource::manual_override;
        if (row.corrected != marked) {
            fail(errc::out_of_domain,
                 "profile row corrected flag inconsistent with its source");
        }
        if (i > 0 && !(table.rows[i - 1].h < row.h)) {
            fail(errc::out_of_domain, "profile rows must be strictly increasing in h");
        }
    }
}

ProfileTable build_profile(const ScalarLoopGains& gains,
                           const std::vector<std::pair<double, double>>& samples,
                           WarningList* warnings) {
    validate(gains);
    std::vector<std::pair<double, double>> sorted = samples;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    ProfileTable table;
    table.gains = gains;
    table.rows.reserve(sorted.size());
    for (const auto& [h, ratio] : sorted) {
        if (!table.rows.empty() && same_h(table.rows.back().h, h)) {
            fail(errc::out_of_domain, "duplicate sampling period h=" + fmt17(h));
        }
        double tau = 0.0;
        try {
            tau = delay_from_ratio({gains, h, ratio}, warnings);
        } catch (const error& e) {
            std::ostringstream msg;
            msg << "row h=" << fmt17(h) << ": " << e.what();
            fail(e.code(), msg.str());
        }
        table.rows.push_back({h, ratio, tau, false, RowSource::computed});
    }
    return table;
}

namespace {

// Linear interpolation of row i's tau from the nearest rows outside the
// flagged set, one on each side. Errors are phrased for the correction use
// case, where a missing side means the row cannot be corrected.
double interp_from_unflagged(const ProfileTable& table, int i, const std::vector<int>& flagged) {
    const auto is_flagged = [&](int j) {
        return std::find(flagged.begin(), flagged.end(), j) != flagged.end();
    };
    int lo = i - 1;
    while (lo >= 0 && is_flagged(lo)) --lo;
    int hi = i + 1;
    while (hi < static_cast<int>(table.rows.size()) && is_flagged(hi)) ++hi;
    if (lo < 0 || hi >= static_cast<int>(table.rows.size())) {
        fail(errc::out_of_domain,
             "unsupported correction: row h=" + fmt17(table.rows[static_cast<std::size_t>(i)].h) +
                 " has no unflagged neighbor on both sides");
    }
    const ProfileRow& a = table.rows[static_cast<std::size_t>(lo)];
    const ProfileRow& b = table.rows[static_cast<std::size_t>(hi)];
    const double w = (table.rows[static_cast<std::size_t>(i)].h - a.h) / (b.h - a.h);
    return a.tau + w * (b.tau - a.tau);
}

}  // namespace

std::vector<int> detect_irregular(const ProfileTable& table, double threshold_factor) {
    validate(table);
    const int n = static_cast<int>(table.rows.size());
    if (n < 3) {
        fail(errc::insufficient_data, "irregularity detection needs at least 3 rows");
    }

    // One-sided residual: how far the row pokes ABOVE its neighbors' chord.
    std::vector<double> residual(static_cast<std::size_t>(n), 0.0);
    std::vector<double> interior;
    for (int i = 1; i + 1 < n; ++i) {
        const ProfileRow& a = table.rows[static_cast<std::size_t>(i - 1)];
        const ProfileRow& b = table.rows[static_cast<std::size_t>(i + 1)];
        const double w = (table.rows[static_cast<std::size_t>(i)].h - a.h) / (b.h - a.h);
        const double chord = a.tau + w * (b.tau - a.tau);
        residual[static_cast<std::size_t>(i)] =
            std::max(table.rows[static_cast<std::size_t>(i)].tau - chord, 0.0);
        interior.push_back(residual[static_cast<std::size_t>(i)]);
    }

    std::sort(interior.begin(), interior.end());
    const std::size_t m = interior.size();
    const double median =
        (m % 2 == 1) ? interior[m / 2] : 0.5 * (interior[m / 2 - 1] + interior[m / 2]);

    std::vector<int> flagged;
    for (int i = 1; i + 1 < n; ++i) {
        if (residual[static_cast<std::size_t>(i)] > threshold_factor * median) {
            flagged.push_back(i);
        }
    }
    std::sort(flagged.begin(), flagged.end(), [&](int a, int b) {
        const double ra = residual[static_cast<std::size_t>(a)];
        const double rb = residual[static_cast<std::size_t>(b)];
        if (ra != rb) return ra > rb;
        return a < b;
    });
    return flagged;
}

double neighbor_interpolation(const ProfileTable& table, int index,
                              const std::vector<int>& flagged) {
    validate(table);
    if (index < 0 || index >= static_cast<int>(table.rows.size())) {
        fail(errc::out_of_domain, "interpolation index out of range");
    }
    return interp_from_unflagged(table, index, flagged);
}

ProfileTable correct_piecewise(const ProfileTable& table, const std::vector<int>& indices,
                               const std::map<double, double>& overrides) {
    validate(table);
    const int n = static_cast<int>(table.rows.size());
    for (int i : indices) {
        if (i < 0 || i >= n) {
            fail(errc::out_of_domain, "correction index out of range");
        }
        if (i == 0 || i == n - 1) {
            fail(errc::out_of_domain,
                 "unsupported correction: endpoint row h=" +
                     fmt17(table.rows[static_cast<std::size_t>(i)].h) +
                     " has no two-sided neighborhood");
        }
    }
    for (const auto& [h, tau] : overrides) {
        (void)tau;
        const bool known = std::any_of(table.rows.begin(), table.rows.end(),
                                       [&](const ProfileRow& r) { return same_h(r.h, h); });
        if (!known) {
            fail(errc::out_of_domain, "override key h=" + fmt17(h) + " matches no profile row");
        }
    }

    ProfileTable out = table;
    for (int i : indices) {
        ProfileRow& row = out.rows[static_cast<std::size_t>(i)];
        const auto ov = std::find_if(overrides.begin(), overrides.end(),
                                     [&](const auto& kv) { return same_h(kv.first, row.h); });
        if (ov != overrides.end()) {
            row.tau = ov->second;
            row.source = RowSource::manual_override;
        } else {
            // interpolate from the original values so the result does not
            // depend on the order flagged rows are processed in
            row.tau = interp_from_unflagged(table, i, indices);
            row.source = RowSource::interpolated;
        }
        row.corrected = true;
    }
    return out;
}

void save_profile_csv(const ProfileTable& table, std::ostream& out) {
    validate(table);
    out << "h,ratio,tau,corrected,source\n";
    for (const ProfileRow& row : table.rows) {
        out << fmt17(row.h) << ',';
        if (row.ratio.has_value()) {
            out << fmt17(*row.ratio);
        }
        out << ',' << fmt17(row.tau) << ',' << (row.corrected ? "true" : "false") << ','
            << to_string(row.source) << '\n';
    }
}

void save_profile_csv(const ProfileTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings everywhere
    if (!out) {
        fail(errc::usage, "cannot open '" + path + "' for writing");
    }
    save_profile_csv(table, out);
    if (!out) {
        fail(errc::usage, "failed writing '" + path + "'");
    }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& text, int line, const char* what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        parse_fail(line, std::string("cannot parse ") + what + " from '" + text + "'");
    }
    return v;
}

}  // namespace

ProfileTable load_profile_csv(std::istream& in) {
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) {
        fail(errc::bad_input, "profile CSV is empty (missing header)");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "h,ratio,tau,corrected,source") {
        parse_fail(lineno, "unexpected header '" + line + "'");
    }

    ProfileTable table;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 5) {
            parse_fail(lineno, "expected 5 fields, got " + std::to_string(f.size()));
        }
        ProfileRow row;
        row.h = parse_double(f[0], lineno, "h");
        if (!f[1].empty()) {
            row.ratio = parse_double(f[1], lineno, "ratio");
        }
        row.tau = parse_double(f[2], lineno, "tau");
        if (f[3] == "true") {
            row.corrected = true;
        } else if (f[3] == "false") {
            row.corrected = false;
        } else {
            parse_fail(lineno, "corrected must be true or false, got '" + f[3] + "'");
        }
        try {
            row.source = row_source_from(f[4]);
        } catch (const error& e) {
            parse_fail(lineno, e.what());
        }
        if (!table.rows.empty() && !(table.rows.back().h < row.h)) {
            parse_fail(lineno, "h values must be strictly increasing");
        }
        table.rows.push_back(row);
    }
    try {
        validate(table);
    } catch (const error& e) {
        fail(errc::bad_input, std::string("profile CSV: ") + e.what());
    }
    return table;
}

ProfileTable load_profile_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(errc::usage, "cannot open profile CSV '" + path + "'");
    }
    return load_profile_csv(in);
}

}  // namespace delayopt
