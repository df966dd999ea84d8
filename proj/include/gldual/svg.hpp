#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gldual {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Static line plot, one polyline per series, linear axes with tick labels.
// Rendering only; never used for pass/fail decisions.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series);

}  // namespace gldual
