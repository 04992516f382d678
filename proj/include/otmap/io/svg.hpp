#pragma once

#include "otmap/point_set.hpp"

#include <string>
#include <vector>

namespace otmap::io {

inline constexpr const char* kRealColor = "#2ca02c";        // green
inline constexpr const char* kGeneratedColor = "#1f77b4";   // blue
inline constexpr const char* kPredictionColor = "#9467bd";  // purple
inline constexpr const char* kMatchColor = "#d62728";       // red

struct PlotLayer {
  std::string name;
  PointSet points;  // uses the first two coordinates
  std::string color;
};

struct Segment {
  double x0, y0, x1, y1;
};

struct SvgOptions {
  int width = 640;
  int height = 640;
  double margin_fraction = 0.05;  // of the data span, on every side
};

/// Scatter plot with optional match segments. Geometry is written in data
/// coordinates inside a single transformed group, so element attributes are
/// the original point coordinates. Axes are autoscaled over all layers and
/// segments with a fixed relative margin.
std::string render_svg(const std::vector<PlotLayer>& layers, const std::vector<Segment>& segments = {},
                       const SvgOptions& options = {});

}  // namespace otmap::io
