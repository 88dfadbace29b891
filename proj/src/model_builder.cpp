#include "metromap/model_builder.hpp"

#include <algorithm>
#include <cmath>

#include "metromap/errors.hpp"

namespace metromap {

ModelParams ModelParams::defaults(const MetroGraph& graph, int k, int s, double l_min,
                                  double d_min, ObjectiveWeights weights) {
  ModelParams p;
  p.k = k;
  p.s = s;
  p.min_edge_length = l_min;
  p.min_separation = d_min;
  p.weights = weights;
  p.derive_bounds(graph.edge_count());
  return p;
}

void ModelParams::derive_bounds(std::size_t edge_count) {
  coord_bound = 4.0 * static_cast<double>(std::max<std::size_t>(edge_count, 1)) * min_edge_length;
  big_m = std::max(8.0, 3.0 * k) * coord_bound;
}

void ModelParams::validate() const {
  if (k < 2) throw Error(ErrorCode::kInvalidParams, "k must be at least 2");
  if (s < 1) throw Error(ErrorCode::kInvalidParams, "s must be at least 1");
  if (s >= k) throw Error(ErrorCode::kInvalidParams, "s must be smaller than k");
  if (!(min_edge_length > 0.0)) throw Error(ErrorCode::kInvalidParams, "L_min must be positive");
  if (!(min_separation > 0.0)) throw Error(ErrorCode::kInvalidParams, "d_min must be positive");
  if (!(coord_bound > 0.0)) throw Error(ErrorCode::kInvalidParams, "coordinate bound must be positive");
  // |z| <= sqrt(2) * coord_bound, so differences stay below M.
  if (!(big_m > 2.0 * std::sqrt(2.0) * coord_bound * k)) {
    throw Error(ErrorCode::kInvalidParams, "big-M too small for the coordinate bound");
  }
  if (weights.bends < 0 || weights.topo < 0 || weights.length < 0) {
    throw Error(ErrorCode::kInvalidParams, "objective weights must be non-negative");
  }
  if (weights.bends == 0 && weights.topo == 0 && weights.length == 0) {
    throw Error(ErrorCode::kInvalidParams, "at least one objective weight must be positive");
  }
}

nlohmann::json VariableRegistry::to_json(const MipProblem& problem) const {
  nlohmann::json out = nlohmann::json::object();
  for (VarId v = 0; v < keys.size() && v < problem.variable_count(); ++v) {
    out[problem.variable(v).name] = keys[v];
  }
  return out;
}

std::vector<int> admissible_directions(int original_sector, int s, int k) {
  std::vector<int> out;
  for (int o = -s; o <= s; ++o) out.push_back(((original_sector + o) % (2 * k) + 2 * k) % (2 * k));
  return out;
}

namespace {

VarId declare(ModelBuild& b, std::string name, VarType type, double lo, double hi, std::string key) {
  const VarId id = b.problem.add_variable(std::move(name), type, lo, hi);
  b.registry.keys.resize(id + 1);
  b.registry.keys[id] = std::move(key);
  return id;
}

std::string vid(const MetroGraph& g, VertexIndex v) { return g.vertex(v).id; }

std::string edge_key(const MetroGraph& g, EdgeIndex e) {
  return vid(g, g.edge(e).u) + "," + vid(g, g.edge(e).v);
}

}  // namespace

// _____________________________________________________________________________
void add_coordinate_system(ModelBuild& b, const MetroGraph& graph, const OrientationSystem& system,
                           const ModelParams& params) {
  auto& reg = b.registry;
  const int k = system.k();
  const double bound = params.coord_bound;
  const double zbound = 2.0 * bound;
  reg.x.assign(graph.vertex_count(), 0);
  reg.y.assign(graph.vertex_count(), 0);
  reg.z.assign(graph.vertex_count(), {});
  reg.z_ortho.assign(graph.vertex_count(), {});
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    const std::string sv = std::to_string(v);
    reg.x[v] = declare(b, "x_" + sv, VarType::kContinuous, -bound, bound, "x(" + vid(graph, v) + ")");
    reg.y[v] = declare(b, "y_" + sv, VarType::kContinuous, -bound, bound, "y(" + vid(graph, v) + ")");
    for (int i = 0; i < k; ++i) {
      const std::string si = std::to_string(i);
      reg.z[v].push_back(declare(b, "z_" + sv + "_" + si, VarType::kContinuous, -zbound, zbound,
                                 "coord(" + vid(graph, v) + "," + si + ")"));
      reg.z_ortho[v].push_back(declare(b, "zo_" + sv + "_" + si, VarType::kContinuous, -zbound,
                                       zbound, "ortho(" + vid(graph, v) + "," + si + ")"));
    }
  }
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    for (int i = 0; i < k; ++i) {
      const Point u = unit_vector(system.angle(i));
      const double c = u.x;
      const double s = u.y;
      const std::string tag = std::to_string(v) + "_" + std::to_string(i);
      LinearExpr zdef;
      zdef.add(reg.z[v][i], 1.0).add(reg.x[v], -c).add(reg.y[v], -s);
      b.problem.add_constraint("zdef_" + tag, zdef, Relation::kEqual, 0.0);
      LinearExpr odef;
      odef.add(reg.z_ortho[v][i], 1.0).add(reg.x[v], s).add(reg.y[v], -c);
      b.problem.add_constraint("zodef_" + tag, odef, Relation::kEqual, 0.0);
    }
  }
}

// _____________________________________________________________________________
void add_direction_constraints(ModelBuild& b, const MetroGraph& graph,
                               const OrientationSystem& system, const ModelParams& params) {
  const int k = system.k();
  const int s = params.s;
  if (s >= k) throw Error(ErrorCode::kInvalidParams, "s must be smaller than k");
  const double big_m = params.big_m;
  auto& reg = b.registry;
  reg.edges.assign(graph.edge_count(), {});

  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const Edge& ed = graph.edge(e);
    const std::string se = std::to_string(e);
    auto& ev = reg.edges[e];
    ev.edge = e;
    ev.original_sector =
        sector_of(system, direction_angle(graph.vertex(ed.u).pos, graph.vertex(ed.v).pos));
    ev.direction_numbers = admissible_directions(ev.original_sector, s, k);
    for (int o = -s; o <= s; ++o) ev.offsets.push_back(o);

    ev.dir = declare(b, "dir_" + se, VarType::kInteger, 0.0, 2.0 * k - 1,
                     "dir(" + edge_key(graph, e) + ")");
    for (std::size_t a = 0; a < ev.offsets.size(); ++a) {
      ev.alpha.push_back(declare(b, "a_" + se + "_" + std::to_string(a), VarType::kBinary, 0.0, 1.0,
                                 "alpha(" + edge_key(graph, e) + "," +
                                     std::to_string(ev.direction_numbers[a]) + ")"));
    }

    LinearExpr one;
    for (VarId a : ev.alpha) one.add(a, 1.0);
    b.problem.add_constraint("pick_" + se, one, Relation::kEqual, 1.0);

    LinearExpr dir;
    dir.add(ev.dir, 1.0);
    for (std::size_t a = 0; a < ev.alpha.size(); ++a) dir.add(ev.alpha[a], -ev.direction_numbers[a]);
    b.problem.add_constraint("dirdef_" + se, dir, Relation::kEqual, 0.0);

    for (std::size_t a = 0; a < ev.alpha.size(); ++a) {
      const int d = ev.direction_numbers[a];
      const int axis = d % k;
      const VarId alpha = ev.alpha[a];
      const std::string tag = se + "_" + std::to_string(a);
      const VarId ou = reg.z_ortho[ed.u][axis];
      const VarId ov = reg.z_ortho[ed.v][axis];
      // collinear on the chosen axis when alpha = 1
      LinearExpr up;
      up.add(ou, 1.0).add(ov, -1.0).add(alpha, big_m);
      b.problem.add_constraint("orth1_" + tag, up, Relation::kLessEqual, big_m);
      LinearExpr down;
      down.add(ou, -1.0).add(ov, 1.0).add(alpha, big_m);
      b.problem.add_constraint("orth2_" + tag, down, Relation::kLessEqual, big_m);
      // ordered along the axis by at least L_min
      const VarId zu = reg.z[ed.u][axis];
      const VarId zv = reg.z[ed.v][axis];
      LinearExpr len;
      if (d < k) {
        len.add(zv, 1.0).add(zu, -1.0);
      } else {
        len.add(zu, 1.0).add(zv, -1.0);
      }
      len.add(alpha, -big_m);
      b.problem.add_constraint("minlen_" + tag, len, Relation::kGreaterEqual,
                               params.min_edge_length - big_m);
    }
  }
}

LinearExpr direction_expr(const ModelBuild& b, const MetroGraph& graph, EdgeIndex e,
                          VertexIndex from, int k) {
  const auto& ev = b.registry.edges.at(e);
  LinearExpr out;
  if (graph.edge(e).u == from) {
    out.add(ev.dir, 1.0);
    return out;
  }
  // reverse traversal: dir + k, reduced into [0, 2k) per admissible choice
  for (std::size_t a = 0; a < ev.alpha.size(); ++a) {
    out.add(ev.alpha[a], (ev.direction_numbers[a] + k) % (2 * k));
  }
  return out;
}

// _____________________________________________________________________________
void add_embedding_constraints(ModelBuild& b, const MetroGraph& graph, const ModelParams& params) {
  if (!graph.has_embedding()) {
    throw Error(ErrorCode::kInvalidParams, "graph has no combinatorial embedding");
  }
  const int k = params.k;
  auto& reg = b.registry;
  reg.beta.assign(graph.vertex_count(), {});
  for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
    const auto& order = graph.rotation(v);
    if (order.size() < 2) continue;
    const std::string sv = std::to_string(v);
    LinearExpr one;
    for (std::size_t j = 0; j < order.size(); ++j) {
      reg.beta[v].push_back(declare(b, "b_" + sv + "_" + std::to_string(j), VarType::kBinary, 0.0,
                                    1.0, "beta(" + vid(graph, v) + "," + std::to_string(j) + ")"));
      one.add(reg.beta[v].back(), 1.0);
    }
    b.problem.add_constraint("wrap_" + sv, one, Relation::kEqual, 1.0);
    for (std::size_t j = 0; j < order.size(); ++j) {
      const VertexIndex here = order[j];
      const VertexIndex next = order[(j + 1) % order.size()];
      LinearExpr row = direction_expr(b, graph, *graph.find_edge(v, here), v, k);
      row.add(direction_expr(b, graph, *graph.find_edge(v, next), v, k), -1.0);
      row.add(reg.beta[v][j], -2.0 * k);
      b.problem.add_constraint("order_" + sv + "_" + std::to_string(j), row, Relation::kLessEqual, -1.0);
    }
  }
}

// _____________________________________________________________________________
void add_planarity_constraints(ModelBuild& b, const MetroGraph& graph,
                               const OrientationSystem& system, const ModelParams& params,
                               const std::vector<EdgePair>& pairs) {
  const int k = system.k();
  const double big_m = params.big_m;
  auto& reg = b.registry;
  for (const auto& [first, second] : pairs) {
    if (first >= graph.edge_count() || second >= graph.edge_count() || first == second) {
      throw Error(ErrorCode::kAdjacentPair, "invalid edge pair");
    }
    if (graph.edges_adjacent(first, second)) {
      throw Error(ErrorCode::kAdjacentPair, "planarity pair " + edge_key(graph, first) + " / " +
                                                edge_key(graph, second) + " shares a station");
    }
    const std::size_t p = reg.pairs.size();
    const std::string sp = std::to_string(p);
    PairVars pv{first, second, {}};
    LinearExpr cover;
    for (int i = 0; i < 2 * k; ++i) {
      pv.gamma.push_back(declare(b, "g_" + sp + "_" + std::to_string(i), VarType::kBinary, 0.0, 1.0,
                                 "gamma(" + edge_key(graph, first) + "|" + edge_key(graph, second) +
                                     "," + std::to_string(i) + ")"));
      cover.add(pv.gamma.back(), 1.0);
    }
    b.problem.add_constraint("sep_" + sp, cover, Relation::kGreaterEqual, 1.0);

    const Edge& e = graph.edge(first);
    const Edge& f = graph.edge(second);
    const VertexIndex near_end[2] = {e.u, e.v};
    const VertexIndex far_end[2] = {f.u, f.v};
    for (int i = 0; i < 2 * k; ++i) {
      const int axis = i % k;
      const double sign = i < k ? 1.0 : -1.0;
      int row = 0;
      for (VertexIndex q : far_end) {
        for (VertexIndex p_end : near_end) {
          LinearExpr gap;
          gap.add(reg.z[q][axis], sign).add(reg.z[p_end][axis], -sign).add(pv.gamma[i], -big_m);
          b.problem.add_constraint(
              "dist_" + sp + "_" + std::to_string(i) + "_" + std::to_string(row++), gap,
              Relation::kGreaterEqual, params.min_separation - big_m);
        }
      }
    }
    reg.pairs.push_back(std::move(pv));
  }
}

// _____________________________________________________________________________
void add_bend_costs(ModelBuild& b, const MetroGraph& graph, const ModelParams& params) {
  const int k = params.k;
  auto& reg = b.registry;
  for (const Line& line : graph.lines()) {
    std::vector<bool> seen(graph.vertex_count(), false);
    for (VertexIndex v : line.path) {
      if (seen[v]) throw Error(ErrorCode::kInvalidLine, "line '" + line.id + "' repeats a station");
      seen[v] = true;
    }
    for (std::size_t i = 2; i < line.path.size(); ++i) {
      const VertexIndex u1 = line.path[i - 2];
      const VertexIndex u2 = line.path[i - 1];
      const VertexIndex u3 = line.path[i];
      const std::size_t t = reg.bends.size();
      const std::string st = std::to_string(t);
      const std::string key = line.id + ":" + vid(graph, u1) + "," + vid(graph, u2) + "," + vid(graph, u3);
      BendVars bv;
      bv.line = line.id;
      bv.u1 = u1;
      bv.u2 = u2;
      bv.u3 = u3;
      bv.theta = declare(b, "th_" + st, VarType::kContinuous, 0.0, k, "bend(" + key + ")");
      bv.delta1 = declare(b, "d1_" + st, VarType::kBinary, 0.0, 1.0, "bend_corr(" + key + ",1)");
      bv.delta2 = declare(b, "d2_" + st, VarType::kBinary, 0.0, 1.0, "bend_corr(" + key + ",2)");

      // Δdir = dir(u1,u2) - dir(u2,u3)
      LinearExpr delta = direction_expr(b, graph, *graph.find_edge(u1, u2), u1, k);
      delta.add(direction_expr(b, graph, *graph.find_edge(u2, u3), u2, k), -1.0);
      delta.add(bv.delta1, -2.0 * k).add(bv.delta2, 2.0 * k);

      LinearExpr lower;
      lower.add(bv.theta, 1.0).add(delta, 1.0);
      b.problem.add_constraint("bendlo_" + st, lower, Relation::kGreaterEqual, 0.0);
      LinearExpr upper;
      upper.add(bv.theta, 1.0).add(delta, -1.0);
      b.problem.add_constraint("bendhi_" + st, upper, Relation::kGreaterEqual, 0.0);
      LinearExpr one;
      one.add(bv.delta1, 1.0).add(bv.delta2, 1.0);
      b.problem.add_constraint("bendcorr_" + st, one, Relation::kLessEqual, 1.0);

      b.cost_bends.add(bv.theta, 1.0);
      reg.bends.push_back(std::move(bv));
    }
  }
}

// _____________________________________________________________________________
void add_topographicity(ModelBuild& b, const MetroGraph& graph, const ModelParams& params) {
  auto& reg = b.registry;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    auto& ev = reg.edges.at(e);
    const std::string se = std::to_string(e);
    ev.xi = declare(b, "xi_" + se, VarType::kContinuous, 0.0, params.s,
                    "topo(" + edge_key(graph, e) + ")");
    // dir - sec measured as the signed sector offset, so the 0/2k seam does
    // not inflate the deviation
    LinearExpr shift;
    for (std::size_t a = 0; a < ev.alpha.size(); ++a) shift.add(ev.alpha[a], ev.offsets[a]);
    LinearExpr pos;
    pos.add(ev.xi, 1.0).add(shift, -1.0);
    b.problem.add_constraint("topo1_" + se, pos, Relation::kGreaterEqual, 0.0);
    LinearExpr neg;
    neg.add(ev.xi, 1.0).add(shift, 1.0);
    b.problem.add_constraint("topo2_" + se, neg, Relation::kGreaterEqual, 0.0);
    b.cost_topo.add(ev.xi, 1.0);
  }
}

// _____________________________________________________________________________
void add_compactness(ModelBuild& b, const MetroGraph& graph, const ModelParams& params) {
  auto& reg = b.registry;
  const int k = params.k;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    auto& ev = reg.edges.at(e);
    const Edge& ed = graph.edge(e);
    const std::string se = std::to_string(e);
    ev.lambda = declare(b, "lam_" + se, VarType::kContinuous, params.min_edge_length, kInfinity,
                        "len(" + edge_key(graph, e) + ")");
    for (int i = 0; i < k; ++i) {
      const std::string tag = se + "_" + std::to_string(i);
      LinearExpr a;
      a.add(ev.lambda, 1.0).add(reg.z[ed.u][i], -1.0).add(reg.z[ed.v][i], 1.0);
      b.problem.add_constraint("len1_" + tag, a, Relation::kGreaterEqual, 0.0);
      LinearExpr c;
      c.add(ev.lambda, 1.0).add(reg.z[ed.u][i], 1.0).add(reg.z[ed.v][i], -1.0);
      b.problem.add_constraint("len2_" + tag, c, Relation::kGreaterEqual, 0.0);
    }
    b.cost_length.add(ev.lambda, 1.0);
  }
}

// _____________________________________________________________________________
void assemble_objective(ModelBuild& b, const ModelParams& params) {
  const auto& w = params.weights;
  if (w.bends == 0 && w.topo == 0 && w.length == 0) {
    throw Error(ErrorCode::kInvalidParams, "all objective weights are zero");
  }
  LinearExpr objective;
  if (w.bends != 0) objective.add(b.cost_bends, w.bends);
  if (w.topo != 0) objective.add(b.cost_topo, w.topo);
  if (w.length != 0) objective.add(b.cost_length, w.length);
  b.problem.set_objective(objective.normalized());
}

// _____________________________________________________________________________
ModelBuild build_model(const MetroGraph& graph, const OrientationSystem& system,
                       const ModelParams& params, const std::vector<EdgePair>& pairs) {
  if (params.k != system.k()) {
    throw Error(ErrorCode::kInvalidParams, "params.k does not match the orientation system");
  }
  params.validate();
  validate_degree(graph, params.k);
  ModelBuild b;
  add_coordinate_system(b, graph, system, params);
  add_direction_constraints(b, graph, system, params);
  add_embedding_constraints(b, graph, params);
  add_planarity_constraints(b, graph, system, params, pairs);
  add_bend_costs(b, graph, params);
  add_topographicity(b, graph, params);
  add_compactness(b, graph, params);
  assemble_objective(b, params);
  return b;
}

}  // namespace metromap
