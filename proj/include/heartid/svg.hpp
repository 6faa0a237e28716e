#pragma once

#include <string>
#include <vector>

namespace heartid {

// Minimal static SVG line charts for the report bundle. Layout constants are
// fixed so tests can locate plotted points.
struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

struct SvgChart {
  std::string title, x_label, y_label;
  double width = 640, height = 420;
  double margin = 60;
  std::vector<SvgSeries> series;
  bool diagonal = false;  // dashed chance line for ROC plots

  // Maps a data point into pixel coordinates using the chart's data range.
  std::pair<double, double> to_pixel(double x, double y) const;
  std::string render() const;
};

// Grayscale heatmap with row/column indices on the axes (confusion matrix).
std::string render_heatmap_svg(const std::vector<std::vector<std::size_t>>& counts,
                               const std::string& title);

}  // namespace heartid
