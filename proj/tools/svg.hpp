#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mlnet_cli {

/// Fixed layer palette shared by every chart.
std::string layer_color(const std::string& layer);

struct Series {
    std::string name;
    std::string color;
    std::vector<double> xs;
    std::vector<double> ys;
    std::optional<double> marker;  ///< dashed vertical line, e.g. a median
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Line chart with one polyline per series and a legend.
std::string line_chart(const Axes& axes, const std::vector<Series>& series);

struct Point {
    std::string label;
    double y = 0.0;
    double size = 1.0;  ///< relative marker size
    bool highlight = false;
};

/// Categorical scatter: one marker per point, in the given order.
std::string scatter_chart(const Axes& axes, const std::vector<Point>& points);

}  // namespace mlnet_cli
