#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metromap/geometry.hpp"

namespace metromap {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Vertex {
  std::string id;
  std::string name;
  Point pos;
  bool is_dummy = false;  // inserted at an input edge crossing
};

struct Edge {
  VertexIndex u = 0;
  VertexIndex v = 0;
  double slope = 0.0;  // [0, π)
};

struct Line {
  std::string id;
  std::string color;
  std::vector<VertexIndex> path;
};

// Embedded metro network. Immutable once built; every transformation returns
// a new graph.
class MetroGraph {
 public:
  MetroGraph() = default;

  // Validates and assembles a graph. `edge_pairs` may contain duplicates (in
  // either orientation); they are merged keeping the first orientation seen.
  // If `edge_pairs` is empty the edges are derived from the line paths.
  static MetroGraph build(std::vector<Vertex> vertices,
                          std::vector<std::pair<VertexIndex, VertexIndex>> edge_pairs,
                          std::vector<Line> lines);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Line>& lines() const { return lines_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Vertex& vertex(VertexIndex v) const { return vertices_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }

  std::optional<VertexIndex> find_vertex(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(VertexIndex a, VertexIndex b) const;

  const std::vector<EdgeIndex>& incident_edges(VertexIndex v) const {
    return incidence_.at(v);
  }
  std::size_t degree(VertexIndex v) const { return incidence_.at(v).size(); }
  std::size_t max_degree() const;

  VertexIndex other_end(EdgeIndex e, VertexIndex v) const {
    const Edge& ed = edges_.at(e);
    return ed.u == v ? ed.v : ed.u;
  }
  bool edges_adjacent(EdgeIndex a, EdgeIndex b) const;

  // Counterclockwise cyclic order of neighbors around each vertex. Only
  // present after compute_embedding.
  bool has_embedding() const { return !rotation_.empty(); }
  const std::vector<VertexIndex>& rotation(VertexIndex v) const {
    return rotation_.at(v);
  }

 private:
  friend MetroGraph compute_embedding(const MetroGraph& graph);

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Line> lines_;
  std::vector<std::vector<EdgeIndex>> incidence_;
  std::map<std::pair<VertexIndex, VertexIndex>, EdgeIndex> edge_lookup_;
  std::vector<std::vector<VertexIndex>> rotation_;
  std::map<std::string, VertexIndex, std::less<>> id_lookup_;
};

// Parses the JSON network document:
//   {"stations":[{"id","name","x","y"}], "edges":[{"u","v"}] (optional),
//    "lines":[{"id","color","stations":[...]}]}
MetroGraph parse_graph(std::string_view document);
MetroGraph load_graph(const std::filesystem::path& path);

// Replaces every proper crossing by a degree-4 dummy vertex and reroutes the
// lines through it. Rejects crossings of three or more edges at one point,
// vertices lying on foreign edges, and collinear overlaps.
MetroGraph planarize(const MetroGraph& graph);

// Sorts the neighbors of every vertex counterclockwise, starting from the
// smallest direction angle in [0, 2π).
MetroGraph compute_embedding(const MetroGraph& graph);

// Throws DegreeExceedsDirections if some vertex has more than 2k neighbors.
void validate_degree(const MetroGraph& graph, int k);

// planarize + compute_embedding.
MetroGraph prepare_graph(const MetroGraph& graph);

}  // namespace metromap
