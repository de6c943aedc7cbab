#include "chl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace chl {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string emit_svg(std::span<const SvgSeries> series, const SvgStyle& style) {
  bool any = false;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      any = true;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!any) throw std::invalid_argument("emit_svg: no data points");

  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double pad_x = 0.04 * (x_hi - x_lo);
  const double pad_y = 0.04 * (y_hi - y_lo);
  x_lo -= pad_x;
  x_hi += pad_x;
  y_lo -= pad_y;
  y_hi += pad_y;

  const double m = style.margin;
  const double plot_w = style.width - 2.0 * m;
  const double plot_h = style.height - 2.0 * m;
  double sx = plot_w / (x_hi - x_lo);
  double sy = plot_h / (y_hi - y_lo);
  if (style.equal_axes) sx = sy = std::min(sx, sy);

  const auto px = [&](double x) { return m + (x - x_lo) * sx; };
  const auto py = [&](double y) { return style.height - m - (y - y_lo) * sy; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
         "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<rect x=\"" + num(m) + "\" y=\"" + num(m) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  if (!style.title.empty()) {
    out += "<text x=\"" + num(style.width / 2.0) + "\" y=\"" + num(m - 18.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           escape(style.title) + "</text>\n";
  }

  // Min/max tick labels on both axes.
  out += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  out += "<text x=\"" + num(m) + "\" y=\"" + num(style.height - m + 16.0) +
         "\" text-anchor=\"middle\">" + num(x_lo) + "</text>\n";
  out += "<text x=\"" + num(m + plot_w) + "\" y=\"" + num(style.height - m + 16.0) +
         "\" text-anchor=\"middle\">" + num(x_hi) + "</text>\n";
  out += "<text x=\"" + num(m - 6.0) + "\" y=\"" + num(style.height - m) +
         "\" text-anchor=\"end\">" + num(y_lo) + "</text>\n";
  out += "<text x=\"" + num(m - 6.0) + "\" y=\"" + num(m + 10.0) +
         "\" text-anchor=\"end\">" + num(y_hi) + "</text>\n";
  if (!style.x_label.empty()) {
    out += "<text x=\"" + num(style.width / 2.0) + "\" y=\"" +
           num(style.height - m + 34.0) + "\" text-anchor=\"middle\">" +
           escape(style.x_label) + "</text>\n";
  }
  if (!style.y_label.empty()) {
    out += "<text x=\"14\" y=\"" + num(style.height / 2.0) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(style.height / 2.0) + ")\">" + escape(style.y_label) + "</text>\n";
  }
  out += "</g>\n";

  std::size_t color_idx = 0;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    const char* color = kPalette[color_idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    ++color_idx;
    if (s.kind == SvgSeries::Kind::Line) {
      out += "<path fill=\"none\" stroke=\"";
      out += color;
      out += "\" stroke-width=\"" + num(style.stroke_width) + "\" d=\"";
      bool first = true;
      for (const auto& [x, y] : s.points) {
        out += first ? "M" : " L";
        first = false;
        out += num(px(x)) + " " + num(py(y));
      }
      out += "\"/>\n";
    } else {
      out += "<g fill=\"";
      out += color;
      out += "\">\n";
      for (const auto& [x, y] : s.points) {
        out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" +
               num(style.dot_radius) + "\"/>\n";
      }
      out += "</g>\n";
    }
    if (!s.label.empty()) {
      out += "<text x=\"" + num(m + 8.0) + "\" y=\"" +
             num(m + 16.0 * static_cast<double>(color_idx)) +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"";
      out += color;
      out += "\">" + escape(s.label) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace chl
