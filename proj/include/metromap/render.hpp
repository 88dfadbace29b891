#pragma once

#include <span>
#include <string>
#include <vector>

#include "metromap/layout.hpp"
#include "metromap/metro_graph.hpp"

namespace metromap {

struct RenderStyle {
  double stroke_width = 4.0;
  double line_offset = 5.0;  // distance between parallel strokes on a shared edge
  double station_radius = 2.5;
  double interchange_radius = 5.0;
  double margin = 20.0;
  double scale = 30.0;  // px per map unit
  bool show_stations = false;

  void validate() const;
};

// Scale that fits `points` into a square of `target_px` (before margins).
double fit_scale(std::span<const Point> points, double target_px = 800.0);

// SVG of `graph` drawn at `positions` (indexed like the vertices).
std::string render_svg(const MetroGraph& graph, std::span<const Point> positions,
                       const RenderStyle& style);

std::string render_input_svg(const MetroGraph& graph, const RenderStyle& style);
std::string render_layout_svg(const Layout& layout, const MetroGraph& graph, const RenderStyle& style);

}  // namespace metromap
