#include "metromap/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "metromap/errors.hpp"

namespace metromap {

void RenderStyle::validate() const {
  if (!(stroke_width > 0 && line_offset > 0 && station_radius > 0 && interchange_radius > 0 &&
        margin > 0 && scale > 0)) {
    throw Error(ErrorCode::kInvalidParams, "render style values must be positive");
  }
}

double fit_scale(std::span<const Point> points, double target_px) {
  if (points.empty()) return 1.0;
  double minx = points[0].x, maxx = minx, miny = points[0].y, maxy = miny;
  for (const Point& p : points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double extent = std::max(maxx - minx, maxy - miny);
  return extent > 0 ? target_px / extent : 1.0;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Shortest drawn piece (px) a miter joint may leave behind.
constexpr double kMinPieceLength = 2.0;

// One drawn piece of a line: the offset copy of an edge.
struct Piece {
  Point a, b;  // offset endpoints in traversal order
  Point dir;   // unit direction
};

std::optional<Point> line_intersection(Point p, Point d, Point q, Point e) {
  const double den = cross(d, e);
  if (std::abs(den) < 1e-9) return std::nullopt;
  const double t = cross(q - p, e) / den;
  return p + t * d;
}

}  // namespace

// _____________________________________________________________________________
std::string render_svg(const MetroGraph& graph, std::span<const Point> positions,
                       const RenderStyle& style) {
  style.validate();
  if (positions.size() != graph.vertex_count()) {
    throw Error(ErrorCode::kMissingCoordinates, "positions do not cover every station");
  }
  double minx = kInfinity, maxx = -kInfinity, miny = kInfinity, maxy = -kInfinity;
  for (const Point& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kMissingCoordinates, "non-finite station position");
    }
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  if (positions.empty()) minx = maxx = miny = maxy = 0.0;
  const double pad = style.margin + style.interchange_radius;
  auto screen = [&](Point p) {
    return Point{(p.x - minx) * style.scale + pad, (maxy - p.y) * style.scale + pad};
  };
  const double width = (maxx - minx) * style.scale + 2 * pad;
  const double height = (maxy - miny) * style.scale + 2 * pad;

  // Lines per edge in lexicographic id order.
  std::vector<std::vector<std::string>> on_edge(graph.edge_count());
  for (const Line& line : graph.lines()) {
    for (std::size_t i = 1; i < line.path.size(); ++i) {
      on_edge[*graph.find_edge(line.path[i - 1], line.path[i])].push_back(line.id);
    }
  }
  for (auto& ids : on_edge) std::sort(ids.begin(), ids.end());

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
      << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" fill=\"white\"/>\n<g fill=\"none\" stroke-width=\"" << num(style.stroke_width)
      << "\" stroke-linejoin=\"miter\" stroke-linecap=\"round\">\n";

  std::vector<std::size_t> order(graph.lines().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return graph.lines()[a].id < graph.lines()[b].id; });

  for (std::size_t li : order) {
    const Line& line = graph.lines()[li];
    std::vector<Piece> pieces;
    for (std::size_t i = 1; i < line.path.size(); ++i) {
      const VertexIndex from = line.path[i - 1];
      const VertexIndex to = line.path[i];
      const EdgeIndex e = *graph.find_edge(from, to);
      const auto& ids = on_edge[e];
      const double slot = static_cast<double>(std::find(ids.begin(), ids.end(), line.id) - ids.begin());
      const double offset = (slot - 0.5 * static_cast<double>(ids.size() - 1)) * style.line_offset;
      // The normal follows the stored edge orientation so every line sharing
      // the edge agrees on the side.
      const Point cu = screen(positions[graph.edge(e).u]);
      const Point cv = screen(positions[graph.edge(e).v]);
      const double len = norm(cv - cu);
      const Point normal = len > 0 ? Point{-(cv.y - cu.y) / len, (cv.x - cu.x) / len} : Point{0, 0};
      const Point a = screen(positions[from]) + offset * normal;
      const Point b = screen(positions[to]) + offset * normal;
      const double l = norm(b - a);
      pieces.push_back({a, b, l > 0 ? (1.0 / l) * (b - a) : Point{0, 0}});
    }

    // Miter joints where they keep both neighbors pointing the same way.
    const std::size_t joints = pieces.empty() ? 0 : pieces.size() - 1;
    std::vector<std::optional<Point>> miter(joints);
    for (std::size_t j = 0; j < joints; ++j) {
      const Piece& p = pieces[j];
      const Piece& q = pieces[j + 1];
      if (norm(p.b - q.a) < 1e-9) {
        miter[j] = p.b;
      } else {
        miter[j] = line_intersection(p.a, p.dir, q.a, q.dir);
        if (miter[j] && norm(*miter[j] - p.b) > 4.0 * style.line_offset) miter[j].reset();
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Point s = i > 0 && miter[i - 1] ? *miter[i - 1] : pieces[i].a;
        const Point t = i < joints && miter[i] ? *miter[i] : pieces[i].b;
        if (dot(t - s, pieces[i].dir) >= kMinPieceLength) continue;
        if (i > 0 && miter[i - 1]) {
          miter[i - 1].reset();
          changed = true;
        }
        if (i < joints && miter[i]) {
          miter[i].reset();
          changed = true;
        }
      }
    }

    svg << "<path stroke=\"" << escape(line.color) << "\" data-line=\"" << escape(line.id) << "\" d=\"";
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Point s = i > 0 && miter[i - 1] ? *miter[i - 1] : pieces[i].a;
      const Point t = i < joints && miter[i] ? *miter[i] : pieces[i].b;
      if (i == 0 || !miter[i - 1]) svg << (i == 0 ? "" : " ") << "M " << num(s.x) << ' ' << num(s.y);
      svg << " L " << num(t.x) << ' ' << num(t.y);
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  // Stations.
  std::vector<std::set<std::string>> lines_at(graph.vertex_count());
  for (const Line& line : graph.lines()) {
    for (VertexIndex v : line.path) lines_at[v].insert(line.id);
  }
  svg << "<g stroke=\"black\" stroke-width=\"" << num(0.5 * style.stroke_width) << "\">\n";
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    const Vertex& vx = graph.vertex(v);
    if (vx.is_dummy) continue;
    const bool interchange = graph.degree(v) >= 3 || lines_at[v].size() >= 2;
    if (!interchange && !style.show_stations) continue;
    const Point p = screen(positions[v]);
    const double r = interchange ? style.interchange_radius : style.station_radius;
    svg << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\"" << num(r)
        << "\" fill=\"white\" data-station=\"" << escape(vx.id) << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string render_input_svg(const MetroGraph& graph, const RenderStyle& style) {
  std::vector<Point> pos;
  for (const Vertex& v : graph.vertices()) pos.push_back(v.pos);
  return render_svg(graph, pos, style);
}

std::string render_layout_svg(const Layout& layout, const MetroGraph& graph, const RenderStyle& style) {
  std::vector<Point> pos;
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) pos.push_back(layout.position(graph, v));
  return render_svg(graph, pos, style);
}

}  // namespace metromap
