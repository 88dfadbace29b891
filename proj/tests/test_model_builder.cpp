#include <random>

#include "doctest.h"
#include "metromap/layout.hpp"
#include "metromap/model_builder.hpp"
#include "metromap/simplex.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace metromap;

namespace {

MetroGraph graph_of(const std::vector<oracle::DocStation>& st, const std::vector<std::vector<std::string>>& lines) {
  return prepare_graph(parse_graph(oracle::network_json(st, lines)));
}

MetroGraph single_edge() { return graph_of({{"a", 0, 0}, {"b", 1, 0}}, {{"a", "b"}}); }

const Constraint& row(const MipProblem& p, const std::string& name) {
  for (const Constraint& c : p.constraints()) {
    if (c.name == name) return c;
  }
  FAIL("no row " << name);
  return p.constraints().front();
}

std::size_t rows_with_prefix(const MipProblem& p, const std::string& prefix) {
  std::size_t n = 0;
  for (const Constraint& c : p.constraints()) n += c.name.rfind(prefix, 0) == 0;
  return n;
}

// Values vector with the coordinate variables set from `pos`.
std::vector<double> coordinates(const ModelBuild& b, const OrientationSystem& sys, const std::vector<Point>& pos) {
  std::vector<double> x(b.problem.variable_count(), 0.0);
  for (std::size_t v = 0; v < pos.size(); ++v) {
    x[b.registry.x[v]] = pos[v].x;
    x[b.registry.y[v]] = pos[v].y;
    for (int i = 0; i < sys.k(); ++i) {
      const double c = std::cos(sys.angle(i)), s = std::sin(sys.angle(i));
      x[b.registry.z[v][i]] = c * pos[v].x + s * pos[v].y;
      x[b.registry.z_ortho[v][i]] = -s * pos[v].x + c * pos[v].y;
    }
  }
  return x;
}

// Value of `var` that makes the equality row hold with everything else fixed.
double solve_row(const Constraint& c, VarId var, std::vector<double> x) {
  x[var] = 0.0;
  double coef = 0.0;
  for (const Term& t : c.expr.terms()) {
    if (t.var == var) coef += t.coef;
  }
  return (c.rhs - c.expr.evaluate(x)) / coef;
}

// Smallest value of `var` satisfying every row in which it appears with a
// positive coefficient (>= rows) given the other values.
double tightest_lower(const MipProblem& p, VarId var, std::vector<double> x) {
  double lo = p.variable(var).lower;
  x[var] = 0.0;
  for (const Constraint& c : p.constraints()) {
    for (const Term& t : c.expr.terms()) {
      if (t.var == var && t.coef > 0 && c.relation == Relation::kGreaterEqual) {
        lo = std::max(lo, (c.rhs - c.expr.evaluate(x)) / t.coef);
      }
    }
  }
  return lo;
}

MipProblem with_fixings(const MipProblem& p, const std::vector<std::pair<VarId, double>>& fix) {
  MipProblem q = p;
  for (const auto& [v, value] : fix) {
    LinearExpr e;
    e.add(v, 1.0);
    q.add_constraint("fix_" + p.variable(v).name, e, Relation::kEqual, value);
  }
  return q;
}

}  // namespace

TEST_SUITE("mip_model") {
  TEST_CASE("params defaults and validation") {
    const MetroGraph g = single_edge();
    ModelParams p = ModelParams::defaults(g, 4);
    CHECK(p.coord_bound == doctest::Approx(4.0));
    CHECK(p.big_m == doctest::Approx(12 * 4.0));
    CHECK_NOTHROW(p.validate());
    p.s = 4;
    CHECK_THROWS_AS_CODE(p.validate(), ErrorCode::kInvalidParams);
    p = ModelParams::defaults(g, 4);
    p.weights = {0, 0, 0};
    CHECK_THROWS_AS_CODE(p.validate(), ErrorCode::kInvalidParams);
    p = ModelParams::defaults(g, 4);
    p.big_m = 1.0;
    CHECK_THROWS_AS_CODE(p.validate(), ErrorCode::kInvalidParams);
    p = ModelParams::defaults(g, 3);
    CHECK_THROWS_AS_CODE(build_model(g, aligned_system(4), p), ErrorCode::kInvalidParams);
  }

  TEST_CASE("single edge variable census") {
    const MetroGraph g = single_edge();
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4));
    CHECK(b.registry.edges.at(0).alpha.size() == 3);
    CHECK(b.problem.count(VarType::kBinary) == 3);
    CHECK(b.problem.count(VarType::kInteger) == 1);
    // per vertex x, y, 4 z, 4 z°; plus ξ and λ
    CHECK(b.problem.count(VarType::kContinuous) == 2 * 10 + 2);
    CHECK(b.registry.keys.size() == b.problem.variable_count());
    const auto reg = b.registry.to_json(b.problem);
    CHECK(reg.size() == b.problem.variable_count());
    CHECK(reg.at(b.problem.variable(b.registry.edges.at(0).alpha.at(1)).name).get<std::string>() == "alpha(a,b,0)");
  }

  TEST_CASE("triangle has no planarity pairs") {
    const MetroGraph g = graph_of({{"a", 0, 0}, {"b", 2, 0}, {"c", 1, 1.5}}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
    CHECK(all_nonadjacent_pairs(g).empty());
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4), all_nonadjacent_pairs(g));
    CHECK(b.registry.pairs.empty());
    CHECK(rows_with_prefix(b.problem, "sep_") == 0);
    CHECK_THROWS_AS_CODE(build_model(g, aligned_system(4), ModelParams::defaults(g, 4), {{0, 1}}),
                         ErrorCode::kAdjacentPair);
  }

  TEST_CASE("variable count grows at most linearly in k") {
    const MetroGraph g = prepare_graph(load_fixture("vienna"));
    const auto pairs = all_nonadjacent_pairs(g);
    const std::vector<EdgePair> some(pairs.begin(), pairs.begin() + 20);
    const double v3 = static_cast<double>(build_model(g, aligned_system(3), ModelParams::defaults(g, 3), some).problem.variable_count());
    const double v5 = static_cast<double>(build_model(g, aligned_system(5), ModelParams::defaults(g, 5), some).problem.variable_count());
    CHECK(v5 / v3 >= 1.0);
    CHECK(v5 / v3 <= 5.0 / 3.0);
  }

  TEST_CASE("coordinate rows") {
    const MetroGraph g = single_edge();
    {
      const auto sys = aligned_system(2);
      const ModelBuild b = build_model(g, sys, ModelParams::defaults(g, 2));
      std::vector<double> x(b.problem.variable_count(), 0.0);
      x[b.registry.x[0]] = 0.3;
      x[b.registry.y[0]] = -1.7;
      CHECK(solve_row(row(b.problem, "zdef_0_0"), b.registry.z[0][0], x) == doctest::Approx(0.3));
      CHECK(solve_row(row(b.problem, "zodef_0_0"), b.registry.z_ortho[0][0], x) == doctest::Approx(-1.7));
      CHECK(solve_row(row(b.problem, "zdef_0_1"), b.registry.z[0][1], x) == doctest::Approx(-1.7));
      CHECK(solve_row(row(b.problem, "zodef_0_1"), b.registry.z_ortho[0][1], x) == doctest::Approx(-0.3));
    }
    {
      const auto sys = aligned_system(4);
      const ModelBuild b = build_model(g, sys, ModelParams::defaults(g, 4));
      std::vector<double> x(b.problem.variable_count(), 0.0);
      x[b.registry.x[0]] = 1.0;
      x[b.registry.y[0]] = 1.0;
      CHECK(solve_row(row(b.problem, "zdef_0_1"), b.registry.z[0][1], x) == doctest::Approx(std::sqrt(2.0)));
      CHECK(solve_row(row(b.problem, "zodef_0_1"), b.registry.z_ortho[0][1], x) == doctest::Approx(0.0));
      // all four axes of (1, 1): (1, √2, 1, 0)
      CHECK(solve_row(row(b.problem, "zdef_0_2"), b.registry.z[0][2], x) == doctest::Approx(1.0));
      CHECK(solve_row(row(b.problem, "zdef_0_3"), b.registry.z[0][3], x) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  TEST_CASE("admissible directions") {
    CHECK(admissible_directions(0, 1, 4) == std::vector<int>{7, 0, 1});
    CHECK(admissible_directions(5, 1, 3) == std::vector<int>{4, 5, 0});
    CHECK(admissible_directions(2, 2, 4).size() == 5);
  }

  TEST_CASE("horizontal edge fixed to sector 0") {
    const MetroGraph g = single_edge();
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4));
    const auto& ev = b.registry.edges[0];
    CHECK(ev.original_sector == 0);
    const VarId a0 = ev.alpha[1];  // offset 0
    REQUIRE(ev.direction_numbers[1] == 0);
    MipProblem q = with_fixings(b.problem, {{a0, 1.0}});
    auto extreme = [&](LinearExpr obj) {
      MipProblem r = q;
      r.set_objective(obj);
      const LpResult res = solve_lp(r);
      REQUIRE(res.status == LpStatus::kOptimal);
      return res.objective;
    };
    const VarId xu = b.registry.x[0], xv = b.registry.x[1], yu = b.registry.y[0], yv = b.registry.y[1];
    CHECK(extreme(LinearExpr().add(yv, 1).add(yu, -1)) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(extreme(LinearExpr().add(yv, -1).add(yu, 1)) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(extreme(LinearExpr().add(xv, 1).add(xu, -1)) == doctest::Approx(1.0));
  }

  TEST_CASE("exactly one direction per edge") {
    const MetroGraph g = single_edge();
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4));
    const auto& alpha = b.registry.edges[0].alpha;
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<std::pair<VarId, double>> fix;
      for (int i = 0; i < 3; ++i) fix.emplace_back(alpha[i], (mask >> i) & 1);
      const bool feasible = solve_lp(with_fixings(b.problem, fix)).status == LpStatus::kOptimal;
      CHECK(feasible == (__builtin_popcount(mask) == 1));
    }
  }

  TEST_CASE("embedding rows") {
    const MetroGraph g = graph_of({{"c", 0, 0}, {"e", 1, 0}, {"n", 0, 1}, {"w", -1, 0.1}},
                                  {{"c", "e"}, {"c", "n"}, {"c", "w"}});
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4));
    const VertexIndex c = *g.find_vertex("c");
    CHECK(rows_with_prefix(b.problem, "order_" + std::to_string(c) + "_") == 3);
    CHECK(rows_with_prefix(b.problem, "wrap_" + std::to_string(c)) == 1);
    for (const char* leaf : {"e", "n", "w"}) {
      CHECK(rows_with_prefix(b.problem, "wrap_" + std::to_string(*g.find_vertex(leaf))) == 0);
      CHECK(b.registry.beta[*g.find_vertex(leaf)].empty());
    }
  }

  TEST_CASE("embedding rows accept exactly the cyclic orders of the input") {
    const MetroGraph g = graph_of({{"c", 0, 0}, {"e", 1, 0}, {"n", 0, 1}, {"w", -1, 0}, {"s", 0, -1}},
                                  {{"c", "e"}, {"c", "n"}, {"c", "w"}, {"c", "s"}});
    ModelParams p = ModelParams::defaults(g, 4);
    p.s = 2;
    const ModelBuild b = build_model(g, aligned_system(4), p);
    const VertexIndex c = *g.find_vertex("c");
    const auto& rot = g.rotation(c);
    std::vector<EdgeIndex> around;
    for (VertexIndex v : rot) around.push_back(*g.find_edge(c, v));
    std::vector<const Constraint*> chain;
    for (const Constraint& r : b.problem.constraints()) {
      if (r.name.rfind("order_" + std::to_string(c) + "_", 0) == 0 || r.name == "wrap_" + std::to_string(c)) {
        chain.push_back(&r);
      }
    }
    REQUIRE(chain.size() == 5);
    int accepted = 0;
    for (int code = 0; code < 625; ++code) {
      std::vector<double> x(b.problem.variable_count(), 0.0);
      std::vector<int> dirs;
      int rest = code;
      for (EdgeIndex e : around) {
        const auto& ev = b.registry.edges[e];
        const int pick = rest % 5;
        rest /= 5;
        x[ev.alpha[pick]] = 1.0;
        x[ev.dir] = ev.direction_numbers[pick];
        // the hub is the stored first end of every spoke
        REQUIRE(g.edge(e).u == c);
        dirs.push_back(ev.direction_numbers[pick]);
      }
      // oracle: distinct directions, counterclockwise in rotation order
      int descents = 0;
      bool distinct = true;
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        const int a = dirs[j], nb = dirs[(j + 1) % dirs.size()];
        distinct &= a != nb;
        descents += nb < a;
      }
      const bool expected = distinct && descents == 1;
      bool feasible = false;
      for (std::size_t j = 0; j < b.registry.beta[c].size() && !feasible; ++j) {
        for (VarId v : b.registry.beta[c]) x[v] = 0.0;
        x[b.registry.beta[c][j]] = 1.0;
        bool ok = true;
        for (const Constraint* r : chain) ok &= row_violation(*r, x) <= 1e-9;
        feasible = ok;
      }
      CHECK(feasible == expected);
      accepted += feasible;
    }
    CHECK(accepted > 0);
  }

  TEST_CASE("planarity rows") {
    const MetroGraph g = graph_of({{"a", 0, 0}, {"b", 1, 0}, {"c", 0, 1}, {"d", 1, 1}}, {{"a", "b"}, {"c", "d"}});
    {
      const ModelBuild b = build_model(g, aligned_system(3), ModelParams::defaults(g, 3));
      CHECK(rows_with_prefix(b.problem, "sep_") == 0);
      CHECK(rows_with_prefix(b.problem, "dist_") == 0);
    }
    const ModelBuild b3 = build_model(g, aligned_system(3), ModelParams::defaults(g, 3), {{0, 1}});
    REQUIRE(b3.registry.pairs.size() == 1);
    CHECK(b3.registry.pairs[0].gamma.size() == 6);
    CHECK(rows_with_prefix(b3.problem, "dist_") == 24);
    CHECK(rows_with_prefix(b3.problem, "sep_") == 1);

    // Unit edges at vertical distance d_min; the second edge lies on the +y side.
    const auto sys = aligned_system(4);
    const ModelBuild b = build_model(g, sys, ModelParams::defaults(g, 4), {{0, 1}});
    const EdgeIndex low = *g.find_edge(*g.find_vertex("a"), *g.find_vertex("b"));
    REQUIRE(b.registry.pairs[0].first == low);
    std::vector<double> x = coordinates(b, sys, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    auto pair_rows_ok = [&](int active) {
      for (VarId v : b.registry.pairs[0].gamma) x[v] = 0.0;
      x[b.registry.pairs[0].gamma[active]] = 1.0;
      for (const Constraint& r : b.problem.constraints()) {
        if ((r.name.rfind("dist_", 0) == 0 || r.name.rfind("sep_", 0) == 0) && row_violation(r, x) > 1e-9) return false;
      }
      return true;
    };
    CHECK(pair_rows_ok(2));   // +y: direction π/2
    CHECK_FALSE(pair_rows_ok(6));
    CHECK_FALSE(pair_rows_ok(0));
  }

  TEST_CASE("bend rows") {
    const MetroGraph g = graph_of({{"a", 0, 0}, {"b", 1, 0}, {"c", 2, 0}}, {{"a", "b", "c"}});
    auto min_theta = [&](int k, int delta) {
      const ModelBuild b = build_model(g, aligned_system(k), ModelParams::defaults(g, k));
      REQUIRE(b.registry.bends.size() == 1);
      const BendVars& bv = b.registry.bends[0];
      const auto& e1 = b.registry.edges[*g.find_edge(bv.u1, bv.u2)];
      const auto& e2 = b.registry.edges[*g.find_edge(bv.u2, bv.u3)];
      std::vector<double> x(b.problem.variable_count(), 0.0);
      const int d1 = delta >= 0 ? delta : 0;
      x[e1.dir] = d1;
      x[e2.dir] = d1 - delta;
      std::pair<double, int> best{1e9, -1};
      for (int opt = 0; opt < 3; ++opt) {
        x[bv.delta1] = opt == 1;
        x[bv.delta2] = opt == 2;
        const double theta = tightest_lower(b.problem, bv.theta, x);
        x[bv.theta] = theta;
        bool ok = theta <= b.problem.variable(bv.theta).upper + 1e-9;
        for (const char* prefix : {"bendlo_0", "bendhi_0", "bendcorr_0"}) ok &= row_violation(row(b.problem, prefix), x) <= 1e-9;
        if (ok && theta < best.first) best = {theta, opt};
      }
      return best;
    };
    CHECK(min_theta(4, 0).first == 0.0);
    const auto oct7 = min_theta(4, 7);
    CHECK(oct7.first == 1.0);
    CHECK(oct7.second == 1);  // 7 - 2k·δ1
    const auto tri = min_theta(3, -5);
    CHECK(tri.first == 1.0);
    CHECK(tri.second == 2);  // -5 + 2k·δ2
    CHECK(min_theta(4, 4).first == 4.0);
  }

  TEST_CASE("sector deviation rows") {
    const MetroGraph g = single_edge();
    const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4));
    const auto& ev = b.registry.edges[0];
    for (std::size_t a = 0; a < ev.alpha.size(); ++a) {
      std::vector<double> x(b.problem.variable_count(), 0.0);
      x[ev.alpha[a]] = 1.0;
      CHECK(tightest_lower(b.problem, ev.xi, x) == std::abs(ev.offsets[a]));
    }
    // the seam 7 -> 0 counts as one sector
    CHECK(ev.direction_numbers[0] == 7);
    CHECK(ev.offsets[0] == -1);
  }

  TEST_CASE("edge length rows") {
    const MetroGraph g = single_edge();
    const auto sys = aligned_system(4);
    const ModelBuild b = build_model(g, sys, ModelParams::defaults(g, 4));
    const VarId lam = b.registry.edges[0].lambda;
    CHECK(tightest_lower(b.problem, lam, coordinates(b, sys, {{0, 0}, {2, 0}})) == doctest::Approx(2.0));
    const double h = std::sqrt(0.5);
    CHECK(tightest_lower(b.problem, lam, coordinates(b, sys, {{0, 0}, {h, h}})) == doctest::Approx(1.0));
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int t = 0; t < 50; ++t) {
      const Point p{U(rng), U(rng)}, q{U(rng), U(rng)};
      const double lambda = tightest_lower(b.problem, lam, coordinates(b, sys, {p, q}));
      double projection = 0;
      for (int i = 0; i < 4; ++i) {
        projection = std::max(projection, std::abs(std::cos(sys.angle(i)) * (q.x - p.x) + std::sin(sys.angle(i)) * (q.y - p.y)));
      }
      const double euclid = norm(q - p);
      CHECK(lambda == doctest::Approx(std::max(1.0, projection)));
      CHECK(projection <= euclid + 1e-12);
      CHECK(projection >= std::cos(kPi / 8) * euclid - 1e-12);
    }
  }

  TEST_CASE("objective weights") {
    const MetroGraph g = graph_of({{"a", 0, 0}, {"b", 1, 0}, {"c", 2, 0.5}}, {{"a", "b", "c"}});
    auto coef_of = [](const LinearExpr& e, VarId v) {
      double c = 0;
      for (const Term& t : e.terms()) c += t.var == v ? t.coef : 0.0;
      return c;
    };
    for (const ObjectiveWeights& w : {ObjectiveWeights{3, 2, 1}, ObjectiveWeights{10, 5, 1}, ObjectiveWeights{1, 0, 0}}) {
      const ModelBuild b = build_model(g, aligned_system(4), ModelParams::defaults(g, 4, 1, 1.0, 1.0, w));
      const auto& obj = b.problem.objective();
      CHECK(coef_of(obj, b.registry.bends[0].theta) == w.bends);
      CHECK(coef_of(obj, b.registry.edges[0].xi) == w.topo);
      CHECK(coef_of(obj, b.registry.edges[1].lambda) == w.length);
      if (w.topo == 0 && w.length == 0) CHECK(obj.terms().size() == b.cost_bends.terms().size());
    }
  }

  TEST_CASE("the original sectors give a feasible layout without planarity rows") {
    // Keeping every edge in its input sector leaves a feasible LP.
    for (const char* name : {"path3", "cross", "star6"}) {
      CAPTURE(name);
      const MetroGraph g = prepare_graph(load_fixture(name));
      const auto sys = aligned_system(4);
      const ModelBuild b = build_model(g, sys, ModelParams::defaults(g, 4));
      std::vector<std::pair<VarId, double>> fix;
      for (const auto& ev : b.registry.edges) {
        for (std::size_t a = 0; a < ev.alpha.size(); ++a) fix.emplace_back(ev.alpha[a], ev.offsets[a] == 0);
      }
      CHECK(solve_lp(with_fixings(b.problem, fix)).status == LpStatus::kOptimal);
    }
  }
}
