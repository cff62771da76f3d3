#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bsdelab::cli {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

// Minimal standalone SVG line chart with linear axes.
std::string render_svg(const LineChart& chart);
void write_svg(const LineChart& chart, const std::string& path);

}  // namespace bsdelab::cli
