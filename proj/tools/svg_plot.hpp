#pragma once

#include <string>
#include <vector>

namespace sstokes::cli {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LogLogPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    /// Dashed reference lines of these slopes, anchored at the first point of the first series.
    std::vector<double> guide_slopes{0.5, 1.0, 2.0};
};

/// Standalone SVG document with base-2 logarithmic axes.
[[nodiscard]] std::string render_svg(const LogLogPlot& plot);

void write_svg(const LogLogPlot& plot, const std::string& path);

}  // namespace sstokes::cli
