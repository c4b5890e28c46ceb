#pragma once

#include <string>
#include <vector>

namespace sentio {

struct SvgSeries {
  std::string name;
  std::vector<double> values;
  std::string color = "#1f77b4";
};

struct BoxSpec {
  std::string name;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Static SVG 1.1 line chart: one polyline per series over the value index,
/// with axes, tick labels, and a legend. Output bytes are deterministic.
std::string render_line_chart(const std::string& title,
                              const std::vector<SvgSeries>& series,
                              const std::string& x_label = "step",
                              const std::string& y_label = "USD");

/// Static SVG 1.1 box plot; each box gets its own vertical scale band.
std::string render_box_plot(const std::string& title,
                            const std::vector<BoxSpec>& boxes);

}  // namespace sentio
