#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rootflow::cli {

struct Bar {
    double left, right, height;
};

struct Series {
    enum class Kind { scatter, histogram, curve };
    Kind kind = Kind::scatter;
    std::vector<std::pair<double, double>> points;  // scatter, curve
    std::vector<Bar> bars;                          // histogram
    std::string label;
    std::string color = "#1f4e9c";
};

struct PlotStyle {
    std::string title, xlabel, ylabel;
    int width = 640, height = 480;
    bool equal_aspect = false;  // root clouds in the plane
};

// Deterministic SVG. Throws std::invalid_argument if there are no series or
// any series is empty.
void emit_plot(std::ostream& out, std::span<const Series> series, const PlotStyle& style);

}  // namespace rootflow::cli
