#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sstokes::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

}  // namespace

std::string render_svg(const LogLogPlot& plot)
{
    Range xr;
    Range yr;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (s.x[i] > 0.0 && s.y[i] > 0.0) {
                xr.add(std::log2(s.x[i]));
                yr.add(std::log2(s.y[i]));
            }
        }
    }
    if (!std::isfinite(xr.lo)) {
        xr = {0.0, 1.0};
        yr = {0.0, 1.0};
    }
    xr.lo = std::floor(xr.lo - 0.25);
    xr.hi = std::ceil(xr.hi + 0.25);
    yr.lo = std::floor(yr.lo - 0.5);
    yr.hi = std::ceil(yr.hi + 0.5);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double lx) { return kLeft + (lx - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double ly) { return kTop + (yr.hi - ly) / (yr.hi - yr.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(plot.title) << "</text>\n";

    // Grid and ticks at integer powers of two.
    const int xstep = std::max(1, static_cast<int>((xr.hi - xr.lo) / 8));
    const int ystep = std::max(1, static_cast<int>((yr.hi - yr.lo) / 10));
    for (int k = static_cast<int>(xr.lo); k <= static_cast<int>(xr.hi); k += xstep) {
        const double x = px(k);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
           << fmt(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">2<tspan dy=\"-6\" font-size=\"9\">"
           << k << "</tspan></text>\n";
    }
    for (int k = static_cast<int>(yr.lo); k <= static_cast<int>(yr.hi); k += ystep) {
        const double y = py(k);
        os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
           << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">2<tspan dy=\"-6\" font-size=\"9\">"
           << k << "</tspan></text>\n";
    }
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 15)
       << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
    os << "<text transform=\"translate(20," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(plot.y_label) << "</text>\n";

    os << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
       << fmt(pw) << "\" height=\"" << fmt(ph) << "\"/></clipPath></defs>\n";

    double legend_y = kTop + 10;
    auto legend = [&](const std::string& color, const std::string& dash, const std::string& label) {
        const double x = kLeft + pw + 12;
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(legend_y) << "\" x2=\"" << fmt(x + 24) << "\" y2=\""
           << fmt(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
        os << "<text x=\"" << fmt(x + 30) << "\" y=\"" << fmt(legend_y + 4) << "\">" << escape(label) << "</text>\n";
        legend_y += 18;
    };

    // Guide lines through the first data point.
    if (!plot.series.empty() && !plot.series.front().x.empty() && plot.series.front().x.front() > 0.0 &&
        plot.series.front().y.front() > 0.0) {
        const double x0 = std::log2(plot.series.front().x.front());
        const double y0 = std::log2(plot.series.front().y.front()) + 0.5;
        for (double slope : plot.guide_slopes) {
            os << "<line clip-path=\"url(#plot)\" x1=\"" << fmt(px(xr.lo)) << "\" y1=\""
               << fmt(py(y0 + slope * (xr.lo - x0))) << "\" x2=\"" << fmt(px(xr.hi)) << "\" y2=\""
               << fmt(py(y0 + slope * (xr.hi - x0))) << "\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>\n";
            std::ostringstream label;
            label << "slope " << slope;
            legend("#888888", " stroke-dasharray=\"6,4\"", label.str());
        }
    }

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const std::string color = kColors[si % kColors.size()];
        std::ostringstream points;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (s.x[i] > 0.0 && s.y[i] > 0.0) {
                points << fmt(px(std::log2(s.x[i]))) << ',' << fmt(py(std::log2(s.y[i]))) << ' ';
            }
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points.str()
           << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (s.x[i] > 0.0 && s.y[i] > 0.0) {
                os << "<circle cx=\"" << fmt(px(std::log2(s.x[i]))) << "\" cy=\"" << fmt(py(std::log2(s.y[i])))
                   << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
            }
        }
        legend(color, "", s.label);
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const LogLogPlot& plot, const std::string& path)
{
    if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << render_svg(plot);
}

}  // namespace sstokes::cli
