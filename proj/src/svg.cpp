#include "sentio/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sentio {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 86;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 44;
constexpr int kMarginBottom = 48;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void chart_frame(std::string& svg, const std::string& title) {
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" +
         escape(title) + "</text>\n";
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::vector<SvgSeries>& series,
                              const std::string& x_label,
                              const std::string& y_label) {
  double lo = 0.0, hi = 1.0;
  std::size_t max_len = 1;
  bool first = true;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.values.size());
    for (double v : s.values) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto x_of = [&](std::size_t i) {
    const double denom = max_len > 1 ? static_cast<double>(max_len - 1) : 1.0;
    return kMarginLeft + plot_w * static_cast<double>(i) / denom;
  };
  auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::string svg;
  chart_frame(svg, title);

  // axes
  svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop) + "\" x2=\"" +
         fmt(kMarginLeft) + "\" y2=\"" + fmt(kMarginTop + plot_h) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop + plot_h) +
         "\" x2=\"" + fmt(kMarginLeft + plot_w) + "\" y2=\"" + fmt(kMarginTop + plot_h) +
         "\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + fmt(kMarginLeft - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
           fmt(kMarginLeft) + "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(kMarginLeft - 8) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           fmt(v) + "</text>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    const double x = kMarginLeft + plot_w * frac;
    const long index = std::lround((max_len - 1) * frac);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kMarginTop + plot_h) + "\" x2=\"" +
           fmt(x) + "\" y2=\"" + fmt(kMarginTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kMarginTop + plot_h + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           std::to_string(index) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"" +
         fmt(kHeight - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " +
         fmt(kMarginTop + plot_h / 2) + ")\">" + escape(y_label) + "</text>\n";

  std::size_t color_idx = 0;
  double legend_y = kMarginTop + 6;
  for (const auto& s : series) {
    const std::string color =
        s.color.empty() ? kPalette[color_idx % 5] : s.color;
    ++color_idx;
    if (!s.values.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (i) svg += ' ';
        svg += fmt(x_of(i)) + "," + fmt(y_of(s.values[i]));
      }
      svg += "\"/>\n";
    }
    svg += "<rect x=\"" + fmt(kMarginLeft + plot_w - 150) + "\" y=\"" +
           fmt(legend_y - 8) + "\" width=\"12\" height=\"3\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + fmt(kMarginLeft + plot_w - 132) + "\" y=\"" + fmt(legend_y - 3) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.name) +
           "</text>\n";
    legend_y += 16;
  }

  svg += "</svg>\n";
  return svg;
}

std::string render_box_plot(const std::string& title,
                            const std::vector<BoxSpec>& boxes) {
  std::string svg;
  chart_frame(svg, title);

  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double band_w =
      (kWidth - kMarginLeft - kMarginRight) / std::max<std::size_t>(1, boxes.size());

  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& box = boxes[b];
    double lo = box.min, hi = box.max;
    if (hi - lo < 1e-12) {
      hi += 1.0;
      lo -= 1.0;
    }
    const double x0 = kMarginLeft + band_w * b;
    const double cx = x0 + band_w / 2;
    const double half = std::min(40.0, band_w / 4);
    auto y_of = [&](double v) {
      return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo));
    };

    // whiskers and box
    svg += "<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(y_of(box.min)) + "\" x2=\"" +
           fmt(cx) + "\" y2=\"" + fmt(y_of(box.max)) + "\" stroke=\"black\"/>\n";
    for (double v : {box.min, box.max}) {
      svg += "<line x1=\"" + fmt(cx - half / 2) + "\" y1=\"" + fmt(y_of(v)) +
             "\" x2=\"" + fmt(cx + half / 2) + "\" y2=\"" + fmt(y_of(v)) +
             "\" stroke=\"black\"/>\n";
    }
    svg += "<rect x=\"" + fmt(cx - half) + "\" y=\"" + fmt(y_of(box.q3)) +
           "\" width=\"" + fmt(2 * half) + "\" height=\"" +
           fmt(std::max(0.5, y_of(box.q1) - y_of(box.q3))) +
           "\" fill=\"#aec7e8\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(cx - half) + "\" y1=\"" + fmt(y_of(box.median)) +
           "\" x2=\"" + fmt(cx + half) + "\" y2=\"" + fmt(y_of(box.median)) +
           "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(kHeight - 24.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(box.name) + "</text>\n";
    for (double v : {box.min, box.median, box.max}) {
      svg += "<text x=\"" + fmt(cx + half + 6) + "\" y=\"" + fmt(y_of(v) + 4) +
             "\" font-family=\"sans-serif\" font-size=\"10\">" + fmt(v) + "</text>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace sentio
