#pragma once

#include <string>
#include <utility>
#include <vector>

#include "delayopt/profile.hpp"

namespace delayopt::cli {

// Console table of a profile, delays rounded to `decimals` places to stay
// comparable with the reference tables; files carry full precision instead.
std::string format_profile_table(const ProfileTable& table, int decimals);

// Two-column series CSV ("h,tau" style header), 17 significant digits, LF.
std::string format_series_csv(const std::string& x_name, const std::string& y_name,
                              const std::vector<std::pair<double, double>>& points);

// Fixed-decimal formatting helper for console output.
std::string format_fixed(double value, int decimals);

void write_text_file(const std::string& path, const std::string& content);

struct PlotSeries {
    std::vector<std::pair<double, double>> raw;      // uncorrected profile points
    std::vector<std::pair<double, double>> curve;    // fitted model, dense grid
    std::vector<std::pair<double, double>> markers;  // corrected profile points
    std::string title;
};

// Self-contained SVG: raw points, fitted curve, and corrected-point markers
// in one frame with axes and tick labels.
std::string render_svg(const PlotSeries& series);

}  // namespace delayopt::cli
