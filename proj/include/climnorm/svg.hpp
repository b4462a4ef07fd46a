#pragma once

#include <string>
#include <vector>

namespace climnorm::svg {

struct Line {
    std::string label;
    std::vector<double> y;  ///< NaN breaks the line
    std::string color;
};

/// Self-contained SVG line chart; every line shares the x coordinates.
std::string line_chart(const std::string& title, const std::vector<double>& x,
                       const std::vector<Line>& lines, const std::string& x_label = "",
                       const std::string& y_label = "");

/// Stem plot of filter or kernel weights against their offsets.
std::string stem_plot(const std::string& title, const std::vector<double>& x,
                      const std::vector<double>& y, const std::string& x_label = "offset",
                      const std::string& y_label = "weight");

}  // namespace climnorm::svg
