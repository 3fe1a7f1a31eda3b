#pragma once

// Self-contained SVG line/marker plots for the CLI artifacts.

#include <string>
#include <vector>

namespace gralab::io {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  ///< draw points instead of a polyline
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    int width = 640;
    int height = 420;
};

/// Renders the series into a standalone SVG document. Points with
/// non-finite coordinates (or x <= 0 on a log axis) are skipped.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

} // namespace gralab::io
