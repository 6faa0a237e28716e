#include "heartid/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heartid/textio.hpp"

namespace heartid {

namespace {

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range span_of(const std::vector<SvgSeries>& series, bool use_x) {
  Range r{1e300, -1e300};
  for (const auto& s : series)
    for (double v : (use_x ? s.x : s.y)) {
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  if (r.lo > r.hi) return {0.0, 1.0};
  if (r.hi - r.lo < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

}  // namespace

std::pair<double, double> SvgChart::to_pixel(double x, double y) const {
  Range rx = span_of(series, true), ry = span_of(series, false);
  if (diagonal) {  // ROC plots pin the unit square
    rx = {0.0, 1.0};
    ry = {0.0, 1.0};
  }
  double px = margin + (x - rx.lo) / (rx.hi - rx.lo) * (width - 2 * margin);
  double py = height - margin - (y - ry.lo) / (ry.hi - ry.lo) * (height - 2 * margin);
  return {px, py};
}

std::string SvgChart::render() const {
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  ss << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-size=\"16\">" << title << "</text>\n";
  // axes
  ss << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
     << width - margin << "\" y2=\"" << height - margin
     << "\" stroke=\"black\"/>\n";
  ss << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  ss << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  ss << "<text x=\"16\" y=\"" << height / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << height / 2 << ")\">" << y_label << "</text>\n";
  if (diagonal) {
    auto [x0, y0] = to_pixel(0.0, 0.0);
    auto [x1, y1] = to_pixel(1.0, 1.0);
    ss << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
       << "\" y2=\"" << y1 << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  }
  double legend_y = margin;
  for (const auto& s : series) {
    if (s.x.empty()) continue;
    ss << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      auto [px, py] = to_pixel(s.x[i], s.y[i]);
      ss << fmt_double(px, 2) << ',' << fmt_double(py, 2) << ' ';
    }
    ss << "\"/>\n";
    if (!s.label.empty()) {
      ss << "<text x=\"" << width - margin - 150 << "\" y=\"" << legend_y
         << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label
         << "</text>\n";
      legend_y += 16;
    }
  }
  ss << "</svg>\n";
  return ss.str();
}

std::string render_heatmap_svg(const std::vector<std::vector<std::size_t>>& counts,
                               const std::string& title) {
  if (counts.empty()) throw std::invalid_argument("heatmap: empty matrix");
  const std::size_t n = counts.size();
  const double margin = 60, cell = std::max(4.0, std::min(24.0, 480.0 / n));
  const double w = margin * 2 + cell * n, h = margin * 2 + cell * n;
  std::size_t mx = 1;
  for (const auto& row : counts)
    for (std::size_t v : row) mx = std::max(mx, v);

  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\">\n";
  ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  ss << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-size=\"16\">" << title << "</text>\n";
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < counts[r].size(); ++c) {
      int shade = 255 - static_cast<int>(std::lround(
                            230.0 * static_cast<double>(counts[r][c]) /
                            static_cast<double>(mx)));
      ss << "<rect x=\"" << margin + cell * c << "\" y=\"" << margin + cell * r
         << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
         << shade << ',' << shade << ',' << shade << ")\"/>\n";
    }
  ss << "<text x=\"" << w / 2 << "\" y=\"" << h - 16
     << "\" text-anchor=\"middle\" font-size=\"12\">predicted</text>\n";
  ss << "<text x=\"16\" y=\"" << h / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << h / 2 << ")\">true</text>\n";
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace heartid
