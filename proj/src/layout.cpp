#include "metromap/layout.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "metromap/errors.hpp"

namespace metromap {

Point Layout::position(const MetroGraph& graph, VertexIndex v) const {
  const auto it = coords.find(graph.vertex(v).id);
  if (it == coords.end()) {
    throw Error(ErrorCode::kMissingCoordinates, "no coordinates for station '" + graph.vertex(v).id + "'");
  }
  return it->second;
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  auto line = [&](const char* name, const CheckResult& c) {
    out << name << ": " << (c.passed ? "pass" : "FAIL");
    if (!c.passed) {
      out << " (" << c.witnesses.size() << " witnesses";
      if (!c.witnesses.empty()) out << ", first: " << c.witnesses.front();
      out << ")";
    }
    out << '\n';
  };
  line("parallel", parallel);
  line("length", length);
  line("separation", separation);
  line("embedding", embedding);
  return out.str();
}

Layout extract_layout(const MipSolution& solution, const VariableRegistry& registry,
                      const MipProblem& problem, const MetroGraph& graph,
                      const OrientationSystem& system, const ModelParams& params) {
  if (!solution.has_values()) {
    throw Error(ErrorCode::kNotSolved,
                "cannot extract a layout from a " + std::string(to_string(solution.status)) + " solution");
  }
  Layout layout(system, params);
  auto value = [&](VarId id) {
    const std::string& name = problem.variable(id).name;
    const auto it = solution.assignment.find(name);
    if (it == solution.assignment.end()) {
      throw Error(ErrorCode::kMissingVariable, "solution has no value for '" + name + "'");
    }
    return it->second;
  };
  if (registry.x.size() != graph.vertex_count()) {
    throw Error(ErrorCode::kMissingVariable, "registry does not cover the graph");
  }
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    layout.coords[graph.vertex(v).id] = {value(registry.x[v]), value(registry.y[v])};
  }
  layout.provenance.status = solution.status;
  layout.provenance.objective = solution.objective;
  layout.provenance.gap = solution.gap;
  layout.provenance.rounds = 1;
  layout.provenance.planarity_pairs = registry.pairs.size();
  return layout;
}

namespace {

std::string edge_name(const MetroGraph& g, EdgeIndex e) {
  return g.vertex(g.edge(e).u).id + "-" + g.vertex(g.edge(e).v).id;
}

double axis_coord(const OrientationSystem& system, int axis, Point p) {
  const Point u = unit_vector(system.angle(axis));
  return u.x * p.x + u.y * p.y;
}

// Largest margin by which some direction separates f from e (>= d_min is fine).
double separation_margin(const Layout& layout, const MetroGraph& graph, EdgeIndex e, EdgeIndex f) {
  const int k = layout.system.k();
  const Point pe[2] = {layout.position(graph, graph.edge(e).u), layout.position(graph, graph.edge(e).v)};
  const Point pf[2] = {layout.position(graph, graph.edge(f).u), layout.position(graph, graph.edge(f).v)};
  double best = -kInfinity;
  for (int i = 0; i < 2 * k; ++i) {
    const int axis = i % k;
    const double sign = i < k ? 1.0 : -1.0;
    double worst = kInfinity;
    for (const Point& q : pf) {
      for (const Point& p : pe) {
        worst = std::min(worst, sign * (axis_coord(layout.system, axis, q) - axis_coord(layout.system, axis, p)));
      }
    }
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace

std::vector<EdgePair> all_nonadjacent_pairs(const MetroGraph& graph) {
  std::vector<EdgePair> out;
  for (EdgeIndex a = 0; a < graph.edge_count(); ++a) {
    for (EdgeIndex b = a + 1; b < graph.edge_count(); ++b) {
      if (!graph.edges_adjacent(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

VerificationReport verify_hard_constraints(const Layout& layout, const MetroGraph& graph) {
  VerificationReport report;
  const double tol = kGeometryTolerance;
  const OrientationSystem& sys = layout.system;

  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const Point a = layout.position(graph, graph.edge(e).u);
    const Point b = layout.position(graph, graph.edge(e).v);
    const double len = norm(b - a);
    const double short_by = layout.params.min_edge_length - len;
    if (short_by > tol) {
      report.length.passed = false;
      report.length.witnesses.push_back(edge_name(graph, e) + " has length " + std::to_string(len));
    }
    report.length.worst = std::max(report.length.worst, short_by);
    if (len == 0.0) {
      report.parallel.passed = false;
      report.parallel.witnesses.push_back(edge_name(graph, e) + " is degenerate");
      continue;
    }
    const double slope = slope_angle(a, b);
    double off = kInfinity;
    for (double c : sys.angles()) off = std::min(off, angular_distance(slope, c));
    report.parallel.worst = std::max(report.parallel.worst, off);
    if (off > tol) {
      report.parallel.passed = false;
      report.parallel.witnesses.push_back(edge_name(graph, e) + " is " + std::to_string(off) +
                                          " rad off every orientation");
    }
  }

  for (const auto& [e, f] : all_nonadjacent_pairs(graph)) {
    const double margin = separation_margin(layout, graph, e, f);
    const double missing = layout.params.min_separation - margin;
    report.separation.worst = std::max(report.separation.worst, missing);
    if (missing > tol) {
      report.separation.passed = false;
      report.separation.witnesses.push_back(edge_name(graph, e) + " / " + edge_name(graph, f) +
                                            " separated by only " + std::to_string(margin));
    }
  }

  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    const auto& expected = graph.rotation(v);
    if (expected.size() < 2) continue;
    const Point pv = layout.position(graph, v);
    std::vector<std::pair<double, VertexIndex>> around;
    for (VertexIndex u : expected) {
      const Point pu = layout.position(graph, u);
      around.emplace_back(pu == pv ? -1.0 : direction_angle(pv, pu), u);
    }
    std::sort(around.begin(), around.end());
    bool good = around.front().first >= 0.0;
    for (std::size_t i = 0; good && i < around.size(); ++i) {
      const double next = i + 1 < around.size() ? around[i + 1].first : around.front().first + kTwoPi;
      if (next - around[i].first <= kAngleTolerance) good = false;
    }
    if (good) {
      const auto start = std::find(expected.begin(), expected.end(), around.front().second) - expected.begin();
      for (std::size_t i = 0; i < around.size(); ++i) {
        if (expected[(static_cast<std::size_t>(start) + i) % expected.size()] != around[i].second) good = false;
      }
    }
    if (!good) {
      report.embedding.passed = false;
      report.embedding.worst = 1.0;
      report.embedding.witnesses.push_back("neighbor order changed at '" + graph.vertex(v).id + "'");
    }
  }
  return report;
}

std::vector<int> realized_directions(const Layout& layout, const MetroGraph& graph) {
  std::vector<int> out(graph.edge_count());
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const Point a = layout.position(graph, graph.edge(e).u);
    const Point b = layout.position(graph, graph.edge(e).v);
    out[e] = sector_of(layout.system, direction_angle(a, b));
  }
  return out;
}

MetricsReport compute_metrics(const Layout& layout, const MetroGraph& graph) {
  MetricsReport m;
  const int k = layout.system.k();
  const auto dirs = realized_directions(layout, graph);
  auto dir_from = [&](VertexIndex a, VertexIndex b) {
    const EdgeIndex e = *graph.find_edge(a, b);
    return graph.edge(e).u == a ? dirs[e] : (dirs[e] + k) % (2 * k);
  };
  for (const Line& line : graph.lines()) {
    for (std::size_t i = 2; i < line.path.size(); ++i) {
      const int d = std::abs(dir_from(line.path[i - 2], line.path[i - 1]) - dir_from(line.path[i - 1], line.path[i]));
      const int bend = std::min(d, 2 * k - d);
      m.bend_cost += bend;
      m.bend_count += bend != 0;
    }
  }
  double distortion = 0.0;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const Point ia = graph.vertex(graph.edge(e).u).pos;
    const Point ib = graph.vertex(graph.edge(e).v).pos;
    const Point a = layout.position(graph, graph.edge(e).u);
    const Point b = layout.position(graph, graph.edge(e).v);
    if (sector_of(layout.system, direction_angle(ia, ib)) != dirs[e]) ++m.sector_deviation_total;
    distortion += angular_distance(graph.edge(e).slope, slope_angle(a, b));
    m.total_length += norm(b - a);
  }
  const double edges = static_cast<double>(std::max<std::size_t>(graph.edge_count(), 1));
  m.sector_deviation_per_edge = m.sector_deviation_total / edges;
  m.distortion_per_edge = distortion / edges * 180.0 / kPi;
  return m;
}

std::vector<EdgePair> planarity_violations(const Layout& layout, const MetroGraph& graph) {
  std::vector<EdgePair> out;
  for (const auto& [e, f] : all_nonadjacent_pairs(graph)) {
    bool bad = layout.params.min_separation - separation_margin(layout, graph, e, f) > kGeometryTolerance;
    if (!bad) {
      const auto hit = intersect_segments(
          layout.position(graph, graph.edge(e).u), layout.position(graph, graph.edge(e).v),
          layout.position(graph, graph.edge(f).u), layout.position(graph, graph.edge(f).v));
      bad = hit.relation != SegmentRelation::kDisjoint;
    }
    if (bad) out.emplace_back(e, f);
  }
  return out;
}

LazyResult solve_with_lazy_planarity(const MetroGraph& graph, const OrientationSystem& system,
                                     const ModelParams& params, const MipSolveFn& solve,
                                     const LazyOptions& options) {
  if (options.max_rounds < 1) throw Error(ErrorCode::kInvalidParams, "max_rounds must be positive");
  std::vector<EdgePair> pairs = options.lazy ? std::vector<EdgePair>{} : all_nonadjacent_pairs(graph);
  std::set<EdgePair> in_model(pairs.begin(), pairs.end());
  std::vector<RoundInfo> rounds;
  double runtime = 0.0;

  for (int round = 1; round <= options.max_rounds; ++round) {
    ModelBuild model = build_model(graph, system, params, pairs);
    const auto t0 = std::chrono::steady_clock::now();
    MipSolution sol = solve(model);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    runtime += sol.runtime_seconds > 0.0 ? sol.runtime_seconds : dt;
    if (!sol.has_values()) {
      throw Error(ErrorCode::kNotSolved,
                  "round " + std::to_string(round) + " ended " + std::string(to_string(sol.status)));
    }
    Layout layout = extract_layout(sol, model.registry, model.problem, graph, system, params);
    std::size_t added = 0;
    for (const EdgePair& p : planarity_violations(layout, graph)) {
      if (in_model.insert(p).second) {
        pairs.push_back(p);
        ++added;
      }
    }
    rounds.push_back({model.registry.pairs.size(), sol.objective, added, dt});
    if (added == 0) {
      layout.provenance.rounds = round;
      MetricsReport metrics = compute_metrics(layout, graph);
      metrics.runtime_seconds = runtime;
      VerificationReport verification = verify_hard_constraints(layout, graph);
      return LazyResult{std::move(layout), metrics, std::move(verification), std::move(rounds),
                        pairs,
                        std::move(sol), std::move(model)};
    }
  }
  throw Error(ErrorCode::kRoundBudget, "planarity violations remain after " +
                                           std::to_string(options.max_rounds) + " rounds");
}

// _____________________________________________________________________________
// Serialization

nlohmann::json metrics_to_json(const MetricsReport& m) {
  return {{"bend_cost", m.bend_cost},
          {"bend_count", m.bend_count},
          {"sector_deviation_total", m.sector_deviation_total},
          {"sector_deviation_per_edge", m.sector_deviation_per_edge},
          {"distortion_deg_per_edge", m.distortion_per_edge},
          {"total_length", m.total_length}};
}

nlohmann::json layout_to_json(const Layout& layout, const MetricsReport* metrics) {
  nlohmann::json coords = nlohmann::json::object();
  for (const auto& [id, p] : layout.coords) coords[id] = {p.x, p.y};
  const ModelParams& p = layout.params;
  nlohmann::json doc = {
      {"system", system_to_json(layout.system)},
      {"params",
       {{"k", p.k},
        {"s", p.s},
        {"min_edge_length", p.min_edge_length},
        {"min_separation", p.min_separation},
        {"coord_bound", p.coord_bound},
        {"big_m", p.big_m},
        {"weights", {p.weights.bends, p.weights.topo, p.weights.length}}}},
      {"coords", coords},
      {"provenance",
       {{"status", std::string(to_string(layout.provenance.status))},
        {"objective", layout.provenance.objective},
        {"gap", layout.provenance.gap},
        {"rounds", layout.provenance.rounds},
        {"planarity_pairs", layout.provenance.planarity_pairs}}}};
  if (metrics) doc["metrics"] = metrics_to_json(*metrics);
  return doc;
}

Layout layout_from_json(const nlohmann::json& doc) {
  try {
    const auto& pj = doc.at("params");
    ModelParams p;
    p.k = pj.at("k").get<int>();
    p.s = pj.at("s").get<int>();
    p.min_edge_length = pj.at("min_edge_length").get<double>();
    p.min_separation = pj.at("min_separation").get<double>();
    p.coord_bound = pj.at("coord_bound").get<double>();
    p.big_m = pj.at("big_m").get<double>();
    const auto w = pj.at("weights").get<std::vector<double>>();
    if (w.size() != 3) throw Error(ErrorCode::kSchema, "weights need three entries");
    p.weights = {w[0], w[1], w[2]};
    Layout layout(system_from_json(doc.at("system")), p);
    for (const auto& [id, xy] : doc.at("coords").items()) {
      const auto v = xy.get<std::vector<double>>();
      if (v.size() != 2) throw Error(ErrorCode::kSchema, "coordinates of '" + id + "' need two entries");
      layout.coords[id] = {v[0], v[1]};
    }
    if (doc.contains("provenance")) {
      const auto& pr = doc.at("provenance");
      layout.provenance.status = parse_solve_status(pr.at("status").get<std::string>());
      layout.provenance.objective = pr.at("objective").get<double>();
      layout.provenance.gap = pr.value("gap", 0.0);
      layout.provenance.rounds = pr.value("rounds", 1);
      layout.provenance.planarity_pairs = pr.value("planarity_pairs", std::size_t{0});
    }
    return layout;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("layout document: ") + e.what());
  }
}

std::string metrics_csv_header() {
  return "network,k,system,f1,f2,f3,bend_cost,bend_count,sector_dev_total,sector_dev_per_edge,"
         "distortion_deg_per_edge,total_length,runtime_s,status";
}

std::string metrics_csv_row(const std::string& network, const Layout& layout, const MetricsReport& m) {
  char buf[512];
  const auto& w = layout.params.weights;
  std::snprintf(buf, sizeof buf, "%s,%d,%s,%g,%g,%g,%g,%d,%d,%.4f,%.4f,%.4f,%.3f,%s", network.c_str(),
                layout.system.k(), std::string(to_string(layout.system.kind())).c_str(), w.bends, w.topo,
                w.length, m.bend_cost, m.bend_count, m.sector_deviation_total, m.sector_deviation_per_edge,
                m.distortion_per_edge, m.total_length, m.runtime_seconds,
                std::string(to_string(layout.provenance.status)).c_str());
  return buf;
}

}  // namespace metromap
