#include "bsdelab/cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

namespace bsdelab::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 60.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series) {
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x); x1 = std::max(x1, x);
            y0 = std::min(y0, y); y1 = std::max(y1, y);
        }
    }
    if (!(x0 <= x1)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    if (x1 == x0) { x1 = x0 + 1; }
    if (y1 == y0) { y1 = y0 + 1; }
    const double pw = kWidth - 2 * kMargin;
    const double ph = kHeight - 2 * kMargin;
    const auto sx = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
    const auto sy = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(chart.title) + "</text>\n";
    out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" +
           num(kWidth - kMargin) + "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) +
           "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 15) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(chart.x_label) + "</text>\n";
    out += "<text x=\"15\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 15 " +
           num(kHeight / 2) + ")\" text-anchor=\"middle\" font-size=\"12\">" +
           escape(chart.y_label) + "</text>\n";
    for (double v : {x0, x1}) {
        out += "<text x=\"" + num(sx(v)) + "\" y=\"" + num(kHeight - kMargin + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + num(v) + "</text>\n";
    }
    for (double v : {y0, y1}) {
        out += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(sy(v) + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + num(v) + "</text>\n";
    }
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            pts += (pts.empty() ? "" : " ") + num(sx(x)) + "," + num(sy(y));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        out += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kMargin + 14.0 * k) +
               "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + color + "\">" +
               escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const LineChart& chart, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << render_svg(chart);
}

}  // namespace bsdelab::cli
