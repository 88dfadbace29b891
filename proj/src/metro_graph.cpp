#include "metromap/metro_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "metromap/errors.hpp"

namespace metromap {

namespace {

std::pair<VertexIndex, VertexIndex> key(VertexIndex a, VertexIndex b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

MetroGraph MetroGraph::build(std::vector<Vertex> vertices,
                             std::vector<std::pair<VertexIndex, VertexIndex>> edge_pairs,
                             std::vector<Line> lines) {
  MetroGraph g;
  g.vertices_ = std::move(vertices);
  g.lines_ = std::move(lines);

  for (VertexIndex i = 0; i < g.vertices_.size(); ++i) {
    const Vertex& v = g.vertices_[i];
    if (!std::isfinite(v.pos.x) || !std::isfinite(v.pos.y)) {
      throw Error(ErrorCode::kSchema, "station '" + v.id + "' has non-finite coordinates");
    }
    if (!g.id_lookup_.emplace(v.id, i).second) {
      throw Error(ErrorCode::kDuplicateVertex, "duplicate station id '" + v.id + "'");
    }
  }

  const bool derive_edges = edge_pairs.empty();
  if (derive_edges) {
    for (const Line& line : g.lines_) {
      for (std::size_t i = 1; i < line.path.size(); ++i) {
        edge_pairs.emplace_back(line.path[i - 1], line.path[i]);
      }
    }
  }

  g.incidence_.assign(g.vertices_.size(), {});
  for (auto [a, b] : edge_pairs) {
    if (a >= g.vertices_.size() || b >= g.vertices_.size()) {
      throw Error(ErrorCode::kUnknownVertex, "edge references a missing vertex");
    }
    if (a == b) {
      throw Error(ErrorCode::kZeroLengthEdge,
                  "self-loop at station '" + g.vertices_[a].id + "'");
    }
    if (g.vertices_[a].pos == g.vertices_[b].pos) {
      throw Error(ErrorCode::kZeroLengthEdge, "edge '" + g.vertices_[a].id + "'-'" +
                                                  g.vertices_[b].id + "' has zero length");
    }
    if (g.edge_lookup_.contains(key(a, b))) continue;
    const EdgeIndex e = g.edges_.size();
    g.edges_.push_back({a, b, slope_angle(g.vertices_[a].pos, g.vertices_[b].pos)});
    g.edge_lookup_.emplace(key(a, b), e);
    g.incidence_[a].push_back(e);
    g.incidence_[b].push_back(e);
  }

  std::vector<bool> covered(g.edges_.size(), false);
  for (const Line& line : g.lines_) {
    if (line.path.size() < 2) {
      throw Error(ErrorCode::kInvalidLine, "line '" + line.id + "' has fewer than two stations");
    }
    std::set<VertexIndex> seen;
    for (std::size_t i = 0; i < line.path.size(); ++i) {
      if (line.path[i] >= g.vertices_.size()) {
        throw Error(ErrorCode::kUnknownVertex, "line '" + line.id + "' references a missing vertex");
      }
      if (!seen.insert(line.path[i]).second) {
        throw Error(ErrorCode::kInvalidLine, "line '" + line.id + "' visits station '" +
                                                 g.vertices_[line.path[i]].id + "' twice");
      }
      if (i == 0) continue;
      auto it = g.edge_lookup_.find(key(line.path[i - 1], line.path[i]));
      if (it == g.edge_lookup_.end()) {
        throw Error(ErrorCode::kInvalidLine,
                    "line '" + line.id + "' uses missing edge '" +
                        g.vertices_[line.path[i - 1]].id + "'-'" + g.vertices_[line.path[i]].id + "'");
      }
      covered[it->second] = true;
    }
  }
  for (EdgeIndex e = 0; e < g.edges_.size(); ++e) {
    if (!covered[e]) {
      throw Error(ErrorCode::kUncoveredEdge, "edge '" + g.vertices_[g.edges_[e].u].id + "'-'" +
                                                 g.vertices_[g.edges_[e].v].id +
                                                 "' is not on any line");
    }
  }
  return g;
}

std::optional<VertexIndex> MetroGraph::find_vertex(std::string_view id) const {
  auto it = id_lookup_.find(id);
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> MetroGraph::find_edge(VertexIndex a, VertexIndex b) const {
  auto it = edge_lookup_.find(key(a, b));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t MetroGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& inc : incidence_) best = std::max(best, inc.size());
  return best;
}

bool MetroGraph::edges_adjacent(EdgeIndex a, EdgeIndex b) const {
  const Edge& x = edges_.at(a);
  const Edge& y = edges_.at(b);
  return x.u == y.u || x.u == y.v || x.v == y.u || x.v == y.v;
}

// _____________________________________________________________________________
MetroGraph parse_graph(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kSchema, std::string("invalid JSON: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("stations") || !doc["stations"].is_array()) {
    throw Error(ErrorCode::kSchema, "document needs a 'stations' array");
  }
  if (!doc.contains("lines") || !doc["lines"].is_array()) {
    throw Error(ErrorCode::kSchema, "document needs a 'lines' array");
  }

  std::vector<Vertex> vertices;
  std::map<std::string, VertexIndex, std::less<>> ids;
  for (const auto& s : doc["stations"]) {
    if (!s.is_object() || !s.contains("id") || !s["id"].is_string() || !s.contains("x") ||
        !s["x"].is_number() || !s.contains("y") || !s["y"].is_number()) {
      throw Error(ErrorCode::kSchema, "station needs string 'id' and numeric 'x', 'y'");
    }
    Vertex v;
    v.id = s["id"].get<std::string>();
    v.name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : v.id;
    v.pos = {s["x"].get<double>(), s["y"].get<double>()};
    if (!ids.emplace(v.id, vertices.size()).second) {
      throw Error(ErrorCode::kDuplicateVertex, "duplicate station id '" + v.id + "'");
    }
    vertices.push_back(std::move(v));
  }

  auto lookup = [&](const nlohmann::json& ref, const std::string& where) {
    if (!ref.is_string()) throw Error(ErrorCode::kSchema, where + ": station reference must be a string");
    auto it = ids.find(ref.get<std::string>());
    if (it == ids.end()) {
      throw Error(ErrorCode::kUnknownVertex, where + ": unknown station '" + ref.get<std::string>() + "'");
    }
    return it->second;
  };

  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw Error(ErrorCode::kSchema, "'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_object() || !e.contains("u") || !e.contains("v")) {
        throw Error(ErrorCode::kSchema, "edge needs 'u' and 'v'");
      }
      edges.emplace_back(lookup(e["u"], "edge"), lookup(e["v"], "edge"));
    }
  }

  std::vector<Line> lines;
  for (const auto& l : doc["lines"]) {
    if (!l.is_object() || !l.contains("id") || !l["id"].is_string() || !l.contains("stations") ||
        !l["stations"].is_array()) {
      throw Error(ErrorCode::kSchema, "line needs string 'id' and a 'stations' array");
    }
    Line line;
    line.id = l["id"].get<std::string>();
    line.color = l.contains("color") && l["color"].is_string() ? l["color"].get<std::string>()
                                                               : std::string("#444444");
    for (const auto& ref : l["stations"]) line.path.push_back(lookup(ref, "line '" + line.id + "'"));
    lines.push_back(std::move(line));
  }
  return MetroGraph::build(std::move(vertices), std::move(edges), std::move(lines));
}

MetroGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

// _____________________________________________________________________________
namespace {

struct Crossing {
  EdgeIndex first;
  EdgeIndex second;
  Point point;
  double t_first;
  double t_second;
};

// Splits a rerouted path wherever it would revisit a vertex, so that every
// piece stays a simple path.
std::vector<std::vector<VertexIndex>> split_simple(const std::vector<VertexIndex>& path) {
  std::vector<std::vector<VertexIndex>> pieces(1);
  std::set<VertexIndex> seen;
  for (VertexIndex v : path) {
    if (seen.contains(v)) {
      VertexIndex last = pieces.back().back();
      pieces.emplace_back(std::vector<VertexIndex>{last});
      seen = {last};
    }
    pieces.back().push_back(v);
    seen.insert(v);
  }
  return pieces;
}

}  // namespace

MetroGraph planarize(const MetroGraph& graph) {
  const auto& edges = graph.edges();
  const auto& vs = graph.vertices();
  std::vector<Crossing> crossings;

  for (EdgeIndex i = 0; i < edges.size(); ++i) {
    for (EdgeIndex j = i + 1; j < edges.size(); ++j) {
      const Edge& a = edges[i];
      const Edge& b = edges[j];
      const auto hit = intersect_segments(vs[a.u].pos, vs[a.v].pos, vs[b.u].pos, vs[b.v].pos);
      const bool adjacent = graph.edges_adjacent(i, j);
      switch (hit.relation) {
        case SegmentRelation::kDisjoint:
          break;
        case SegmentRelation::kCollinearOverlap:
          throw Error(ErrorCode::kCollinearOverlap,
                      "edges '" + vs[a.u].id + "'-'" + vs[a.v].id + "' and '" + vs[b.u].id +
                          "'-'" + vs[b.v].id + "' overlap");
        case SegmentRelation::kTouching:
          if (!adjacent) {
            throw Error(ErrorCode::kDegenerateCrossing,
                        "edges '" + vs[a.u].id + "'-'" + vs[a.v].id + "' and '" + vs[b.u].id +
                            "'-'" + vs[b.v].id + "' touch outside a shared station");
          }
          break;
        case SegmentRelation::kProperCrossing:
          if (adjacent) {
            throw Error(ErrorCode::kCollinearOverlap, "adjacent edges cross");
          }
          crossings.push_back({i, j, hit.point, hit.t_first, hit.t_second});
          break;
      }
    }
  }
  if (crossings.empty()) return graph;

  for (std::size_t p = 0; p < crossings.size(); ++p) {
    for (std::size_t q = p + 1; q < crossings.size(); ++q) {
      const Point d = crossings[p].point - crossings[q].point;
      if (norm(d) <= 1e-9) {
        throw Error(ErrorCode::kDegenerateCrossing,
                    "three or more edges cross at one point");
      }
    }
  }

  std::vector<Vertex> vertices = vs;
  std::set<std::string> used;
  for (const auto& v : vs) used.insert(v.id);
  // split points per edge: (t, vertex)
  std::vector<std::vector<std::pair<double, VertexIndex>>> splits(edges.size());
  for (std::size_t c = 0; c < crossings.size(); ++c) {
    std::string id = "_x" + std::to_string(c);
    while (used.contains(id)) id = "_" + id;
    used.insert(id);
    const VertexIndex dv = vertices.size();
    vertices.push_back({id, id, crossings[c].point, true});
    splits[crossings[c].first].emplace_back(crossings[c].t_first, dv);
    splits[crossings[c].second].emplace_back(crossings[c].t_second, dv);
  }

  // chain of vertices from edge.u to edge.v
  std::vector<std::vector<VertexIndex>> chains(edges.size());
  std::vector<std::pair<VertexIndex, VertexIndex>> new_edges;
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    auto& sp = splits[e];
    std::sort(sp.begin(), sp.end());
    auto& chain = chains[e];
    chain.push_back(edges[e].u);
    for (const auto& [t, v] : sp) chain.push_back(v);
    chain.push_back(edges[e].v);
    for (std::size_t i = 1; i < chain.size(); ++i) new_edges.emplace_back(chain[i - 1], chain[i]);
  }

  std::vector<Line> lines;
  for (const Line& line : graph.lines()) {
    std::vector<VertexIndex> path{line.path.front()};
    for (std::size_t i = 1; i < line.path.size(); ++i) {
      const EdgeIndex e = *graph.find_edge(line.path[i - 1], line.path[i]);
      std::vector<VertexIndex> chain = chains[e];
      if (chain.front() != line.path[i - 1]) std::reverse(chain.begin(), chain.end());
      path.insert(path.end(), chain.begin() + 1, chain.end());
    }
    auto pieces = split_simple(path);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      Line piece{line.id, line.color, std::move(pieces[p])};
      if (p > 0) piece.id += "~" + std::to_string(p);
      lines.push_back(std::move(piece));
    }
  }
  return MetroGraph::build(std::move(vertices), std::move(new_edges), std::move(lines));
}

// _____________________________________________________________________________
MetroGraph compute_embedding(const MetroGraph& graph) {
  MetroGraph out = graph;
  out.rotation_.assign(graph.vertex_count(), {});
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    std::vector<std::pair<double, VertexIndex>> around;
    for (EdgeIndex e : graph.incident_edges(v)) {
      const VertexIndex w = graph.other_end(e, v);
      around.emplace_back(direction_angle(graph.vertex(v).pos, graph.vertex(w).pos), w);
    }
    std::sort(around.begin(), around.end());
    for (std::size_t i = 0; i < around.size(); ++i) {
      const double next = i + 1 < around.size() ? around[i + 1].first : around[0].first + kTwoPi;
      if (around.size() > 1 && next - around[i].first <= kAngleTolerance) {
        throw Error(ErrorCode::kEqualAngles,
                    "two edges leave station '" + graph.vertex(v).id + "' at the same angle");
      }
      out.rotation_[v].push_back(around[i].second);
    }
  }
  return out;
}

void validate_degree(const MetroGraph& graph, int k) {
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    if (graph.degree(v) > static_cast<std::size_t>(2 * k)) {
      throw DegreeExceedsDirections(graph.vertex(v).id, graph.degree(v), k);
    }
  }
}

MetroGraph prepare_graph(const MetroGraph& graph) {
  return compute_embedding(planarize(graph));
}

}  // namespace metromap
