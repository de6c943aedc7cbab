#pragma once

#include <span>
#include <string>
#include <vector>

namespace chl {

struct SvgSeries {
  enum class Kind { Line, Dots };
  std::string label;
  std::vector<std::pair<double, double>> points;
  Kind kind = Kind::Line;
};

struct SvgStyle {
  int width = 900;
  int height = 560;
  double margin = 54.0;
  std::string title;
  std::string x_label;
  std::string y_label;
  double stroke_width = 1.0;
  double dot_radius = 1.3;
  bool equal_axes = false;  // same unit scale on x and y (cluster pictures)
};

/// Standalone SVG 1.1 document: framed plot area sized from the data bounds,
/// one path (or dot group) per series, min/max tick labels. Byte-identical
/// output for identical input. Throws std::invalid_argument when no series
/// has points.
std::string emit_svg(std::span<const SvgSeries> series, const SvgStyle& style = {});

}  // namespace chl
