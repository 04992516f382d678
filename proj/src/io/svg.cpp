#include "otmap/io/svg.hpp"

#include "otmap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace otmap::io {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<PlotLayer>& layers, const std::vector<Segment>& segments,
                       const SvgOptions& options) {
  if (layers.empty() && segments.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to plot");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto extend = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& layer : layers) {
    if (layer.points.dim() < 2) throw Error(ErrorCode::SizeMismatch, "scatter layers need d >= 2");
    for (Index i = 0; i < layer.points.size(); ++i) extend(layer.points.data()(i, 0), layer.points.data()(i, 1));
  }
  for (const auto& s : segments) {
    extend(s.x0, s.y0);
    extend(s.x1, s.y1);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double pad = span * options.margin_fraction;
  xmin -= pad;
  xmax += pad;
  ymin -= pad;
  ymax += pad;
  const double sx = options.width / (xmax - xmin);
  const double sy = options.height / (ymax - ymin);
  const double radius = 2.0 / std::min(sx, sy);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Maps data (x, y) to pixels with y pointing up.
  svg << "<g transform=\"matrix(" << num(sx) << " 0 0 " << num(-sy) << ' ' << num(-xmin * sx) << ' '
      << num(ymax * sy) << ")\">\n";
  for (const auto& layer : layers) {
    svg << "<g class=\"points\" data-name=\"" << layer.name << "\" fill=\"" << layer.color << "\">\n";
    for (Index i = 0; i < layer.points.size(); ++i) {
      svg << "<circle cx=\"" << num(layer.points.data()(i, 0)) << "\" cy=\"" << num(layer.points.data()(i, 1))
          << "\" r=\"" << num(radius) << "\"/>\n";
    }
    svg << "</g>\n";
  }
  if (!segments.empty()) {
    svg << "<g class=\"matches\" stroke=\"" << kMatchColor << "\" stroke-width=\"1\">\n";
    for (const auto& s : segments) {
      svg << "<line x1=\"" << num(s.x0) << "\" y1=\"" << num(s.y0) << "\" x2=\"" << num(s.x1) << "\" y2=\""
          << num(s.y1) << "\" vector-effect=\"non-scaling-stroke\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace otmap::io
