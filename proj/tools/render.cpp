#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "delayopt/errors.hpp"

namespace delayopt::cli {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_svg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string format_profile_table(const ProfileTable& table, int decimals) {
    const auto pad_left = [](const std::string& text, std::size_t width) {
        return text.size() < width ? std::string(width - text.size(), ' ') + text : text;
    };
    std::ostringstream out;
    out << pad_left("h", 8) << pad_left("ratio", 11) << pad_left("tau", 11) << "  source\n";
    for (const ProfileRow& row : table.rows) {
        const std::string rtxt = row.ratio ? format_fixed(*row.ratio, decimals) : std::string("-");
        out << pad_left(format_fixed(row.h, decimals), 8) << pad_left(rtxt, 11)
            << pad_left(format_fixed(row.tau, decimals), 11) << "  " << to_string(row.source)
            << '\n';
    }
    return out.str();
}

std::string format_series_csv(const std::string& x_name, const std::string& y_name,
                              const std::vector<std::pair<double, double>>& points) {
    std::ostringstream out;
    out << x_name << ',' << y_name << '\n';
    for (const auto& [x, y] : points) {
        out << fmt17(x) << ',' << fmt17(y) << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(errc::usage, "cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        fail(errc::usage, "failed writing '" + path + "'");
    }
}

namespace {

struct Extent {
    double lo = 0.0, hi = 1.0;
    void grow(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

}  // namespace

std::string render_svg(const PlotSeries& series) {
    const double width = 640.0, height = 480.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;

    // shared frame over everything drawn
    bool first = true;
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    const auto grow = [&](const std::vector<std::pair<double, double>>& pts) {
        for (const auto& [x, y] : pts) {
            if (first) {
                xlo = xhi = x;
                ylo = yhi = y;
                first = false;
            } else {
                xlo = std::min(xlo, x);
                xhi = std::max(xhi, x);
                ylo = std::min(ylo, y);
                yhi = std::max(yhi, y);
            }
        }
    };
    grow(series.raw);
    grow(series.curve);
    grow(series.markers);
    if (first) {
        fail(errc::insufficient_data, "nothing to plot: every series is empty");
    }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) yhi = ylo + 1.0;
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    const auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr); };
    const auto Y = [&](double y) {
        return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg << "<rect width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << series.title << "</text>\n";

    // axes
    svg << "<line x1=\"" << fmt_svg(ml) << "\" y1=\"" << fmt_svg(height - mb) << "\" x2=\""
        << fmt_svg(width - mr) << "\" y2=\"" << fmt_svg(height - mb)
        << "\" stroke=\"#000\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt_svg(ml) << "\" y1=\"" << fmt_svg(mt) << "\" x2=\"" << fmt_svg(ml)
        << "\" y2=\"" << fmt_svg(height - mb) << "\" stroke=\"#000\" stroke-width=\"1\"/>\n";

    // ticks: 5 per axis
    for (int i = 0; i <= 4; ++i) {
        const double fx = xlo + (xhi - xlo) * i / 4.0;
        const double fy = ylo + (yhi - ylo) * i / 4.0;
        svg << "<line x1=\"" << fmt_svg(X(fx)) << "\" y1=\"" << fmt_svg(height - mb) << "\" x2=\""
            << fmt_svg(X(fx)) << "\" y2=\"" << fmt_svg(height - mb + 5)
            << "\" stroke=\"#000\"/>\n";
        svg << "<text x=\"" << fmt_svg(X(fx)) << "\" y=\"" << fmt_svg(height - mb + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_fixed(fx, 4) << "</text>\n";
        svg << "<line x1=\"" << fmt_svg(ml - 5) << "\" y1=\"" << fmt_svg(Y(fy)) << "\" x2=\""
            << fmt_svg(ml) << "\" y2=\"" << fmt_svg(Y(fy)) << "\" stroke=\"#000\"/>\n";
        svg << "<text x=\"" << fmt_svg(ml - 8) << "\" y=\"" << fmt_svg(Y(fy) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_fixed(fy, 3) << "</text>\n";
    }
    svg << "<text x=\"" << fmt_svg((ml + width - mr) / 2.0) << "\" y=\"" << fmt_svg(height - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">sampling "
           "period h (s)</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt_svg((mt + height - mb) / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << fmt_svg((mt + height - mb) / 2.0) << ")\">delay tau (s)</text>\n";

    const auto polyline = [&](const std::vector<std::pair<double, double>>& pts,
                              const char* color, const char* dash) {
        if (pts.empty()) return;
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
        svg << " points=\"";
        for (const auto& [x, y] : pts) {
            svg << fmt_svg(X(x)) << ',' << fmt_svg(Y(y)) << ' ';
        }
        svg << "\"/>\n";
    };
    polyline(series.raw, "#888888", "4 3");
    polyline(series.curve, "#c0392b", "");
    for (const auto& [x, y] : series.raw) {
        svg << "<circle cx=\"" << fmt_svg(X(x)) << "\" cy=\"" << fmt_svg(Y(y))
            << "\" r=\"3\" fill=\"none\" stroke=\"#888888\"/>\n";
    }
    for (const auto& [x, y] : series.markers) {
        svg << "<circle cx=\"" << fmt_svg(X(x)) << "\" cy=\"" << fmt_svg(Y(y))
            << "\" r=\"3.5\" fill=\"#2c3e50\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace delayopt::cli
