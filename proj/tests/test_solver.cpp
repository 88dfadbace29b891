#include <cmath>
#include <random>

#include "doctest.h"
#include "metromap/layout.hpp"
#include "metromap/model_builder.hpp"
#include "metromap/simplex.hpp"
#include "metromap/solution_format.hpp"
#include "metromap/solver.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace metromap;

namespace {

MetroGraph path_graph(std::vector<oracle::DocStation> stations) {
  std::vector<std::string> ids;
  for (const auto& s : stations) ids.push_back(s.id);
  return prepare_graph(parse_graph(oracle::network_json(stations, {ids})));
}

ModelBuild model_for(const MetroGraph& g, int k, ObjectiveWeights w) {
  return build_model(g, aligned_system(k), ModelParams::defaults(g, k, 1, 1.0, 1.0, w), all_nonadjacent_pairs(g));
}

double value_of(const MipSolution& s, const std::string& name) { return s.assignment.at(name); }

// Minimum of a 2-variable LP over a box by enumerating every vertex.
std::optional<double> lp2_by_vertices(const std::vector<double>& c, const std::vector<DenseRow>& rows, double box) {
  std::vector<std::array<double, 3>> lines;  // a x + b y = r
  for (const auto& r : rows) lines.push_back({r.coef[0], r.coef[1], r.rhs});
  lines.push_back({1, 0, -box});
  lines.push_back({1, 0, box});
  lines.push_back({0, 1, -box});
  lines.push_back({0, 1, box});
  std::optional<double> best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& p = lines[i];
      const auto& q = lines[j];
      const double det = p[0] * q[1] - p[1] * q[0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (p[2] * q[1] - p[1] * q[2]) / det;
      const double y = (p[0] * q[2] - p[2] * q[0]) / det;
      bool ok = std::abs(x) <= box + 1e-9 && std::abs(y) <= box + 1e-9;
      for (const auto& r : rows) {
        const double lhs = r.coef[0] * x + r.coef[1] * y;
        if (r.relation == Relation::kLessEqual) ok = ok && lhs <= r.rhs + 1e-9;
        if (r.relation == Relation::kGreaterEqual) ok = ok && lhs >= r.rhs - 1e-9;
      }
      if (ok) {
        const double v = c[0] * x + c[1] * y;
        if (!best || v < *best) best = v;
      }
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("simplex textbook problem") {
    const auto r = solve_dense_lp({-1, -1}, {{{1, 2}, Relation::kLessEqual, 4}, {{3, 1}, Relation::kLessEqual, 6}},
                                  {0, 0}, {kInfinity, kInfinity});
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.objective == doctest::Approx(-2.8));
    CHECK(r.x[0] == doctest::Approx(1.6));
    CHECK(r.x[1] == doctest::Approx(1.2));
  }

  TEST_CASE("simplex infeasible and unbounded") {
    CHECK(solve_dense_lp({1}, {{{1}, Relation::kGreaterEqual, 2}, {{1}, Relation::kLessEqual, 1}}, {0}, {kInfinity})
              .status == LpStatus::kInfeasible);
    CHECK(solve_dense_lp({-1}, {}, {0}, {kInfinity}).status == LpStatus::kUnbounded);
  }

  TEST_CASE("simplex with free variables and equalities") {
    // min |x - 3| style: min t with t >= x - 3, t >= 3 - x, x + y = 1, y = -1.
    const auto r = solve_dense_lp({0, 0, 1},
                                  {{{1, 0, -1}, Relation::kLessEqual, 3},
                                   {{-1, 0, -1}, Relation::kLessEqual, -3},
                                   {{1, 1, 0}, Relation::kEqual, 1},
                                   {{0, 1, 0}, Relation::kEqual, -1}},
                                  {-kInfinity, -kInfinity, 0}, {kInfinity, kInfinity, kInfinity});
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.x[0] == doctest::Approx(2));
    CHECK(r.objective == doctest::Approx(1));
  }

  TEST_CASE("simplex agrees with vertex enumeration") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int t = 0; t < 300; ++t) {
      std::vector<DenseRow> rows;
      const int m = 1 + static_cast<int>(rng() % 5);
      for (int i = 0; i < m; ++i) {
        rows.push_back({{U(rng), U(rng)}, rng() % 2 ? Relation::kLessEqual : Relation::kGreaterEqual, U(rng)});
      }
      const std::vector<double> c{U(rng), U(rng)};
      const auto r = solve_dense_lp(c, rows, {-5, -5}, {5, 5});
      const auto oracle_min = lp2_by_vertices(c, rows, 5);
      CAPTURE(t);
      if (!oracle_min) {
        CHECK(r.status == LpStatus::kInfeasible);
      } else {
        REQUIRE(r.status == LpStatus::kOptimal);
        CHECK(r.objective == doctest::Approx(*oracle_min).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("exact oracle: single horizontal edge") {
    const MetroGraph g = path_graph({{"a", 0, 0}, {"b", 1, 0}});
    const ModelBuild m = model_for(g, 4, {1, 1, 1});
    const MipSolution s = solve_exact_tiny(m.problem, m.registry);
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.problem.max_violation(s.values(m.problem)) < 1e-7);
  }

  TEST_CASE("exact oracle: straight two-edge path") {
    const MetroGraph g = prepare_graph(load_fixture("path3"));
    const ModelBuild m = model_for(g, 4, {3, 2, 1});
    const MipSolution s = solve_exact_tiny(m.problem, m.registry);
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(m.cost_bends.evaluate(s.values(m.problem)) == doctest::Approx(0.0));
    CHECK(m.cost_length.evaluate(s.values(m.problem)) == doctest::Approx(2.0));
    CHECK(s.objective == doctest::Approx(2.0));
  }

  TEST_CASE("exact oracle: heavy topographicity forces a bend") {
    const MetroGraph g = path_graph({{"a", 0, 0}, {"b", 1, 0}, {"c", 1, 1}});
    const ModelBuild m = model_for(g, 4, {1, 10, 1});
    const MipSolution s = solve_exact_tiny(m.problem, m.registry);
    REQUIRE(s.status == SolveStatus::kOptimal);
    REQUIRE(m.registry.bends.size() == 1);
    CHECK(value_of(s, m.problem.variable(m.registry.bends[0].theta).name) >= 1 - 1e-9);
    CHECK(s.objective == doctest::Approx(4.0));
  }

  TEST_CASE("exact oracle budget") {
    const MetroGraph g = prepare_graph(load_fixture("star6"));
    const ModelBuild m = model_for(g, 4, {});
    CHECK_THROWS_AS_CODE(solve_exact_tiny(m.problem, m.registry, 10.0), ErrorCode::kBudgetExceeded);
  }

  TEST_CASE("polish keeps integers and cleans continuous values") {
    MipProblem p;
    const VarId b = p.add_binary("b");
    const VarId x = p.add_variable("x", VarType::kContinuous, 0, 10);
    p.add_constraint("c", LinearExpr().add(x, 1).add(b, -2), Relation::kGreaterEqual, 1);
    p.set_objective(LinearExpr().add(x, 1).add(b, 1));
    MipSolution s;
    s.status = SolveStatus::kOptimal;
    s.assignment = {{"b", 1e-9}, {"x", 1.0000004}};
    const MipSolution out = polish_solution(p, s);
    CHECK(out.assignment.at("b") == 0.0);
    CHECK(out.assignment.at("x") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.objective == doctest::Approx(1.0));
  }

  TEST_CASE("plain solution format") {
    const auto s = parse_solution("# status optimal\n# objective 3.5\n# gap 0\nx 3\ny 0.5\n");
    CHECK(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == 3.5);
    CHECK(s.assignment.at("y") == 0.5);
    CHECK(parse_solution("# status timeout\n").status == SolveStatus::kTimeout);
    CHECK(parse_solution("# status timeout\nx 1\n").status == SolveStatus::kFeasible);
    CHECK_THROWS_AS_CODE(parse_solution("x 1 2\n"), ErrorCode::kSolverOutput);
  }

  TEST_CASE("CBC solution format") {
    const std::string text =
        "Optimal - objective value 3.00000000\n"
        "      0 x                      3                       1\n"
        "      1 y                      0                       1\n";
    CHECK(detect_solution_format(text) == SolutionFormat::kCbc);
    const auto s = parse_solution(text);
    CHECK(s.status == SolveStatus::kOptimal);
    CHECK(s.objective == 3);
    CHECK(s.assignment.at("x") == 3);
    CHECK(parse_solution("Infeasible - objective value 0.00000000\n").status == SolveStatus::kInfeasible);
    CHECK(parse_solution("Stopped on time - objective value 1e+50\n").status == SolveStatus::kTimeout);
  }

  TEST_CASE("HiGHS solution format") {
    const std::string text =
        "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 3\n# Columns 2\nx 3\ny 0\n"
        "# Rows 1\nc1 3\n";
    CHECK(detect_solution_format(text) == SolutionFormat::kHighs);
    const auto s = parse_solution(text);
    CHECK(s.status == SolveStatus::kOptimal);
    CHECK(s.assignment.size() == 2);
    CHECK(s.assignment.at("x") == 3);
    CHECK(parse_solution("Model status\nInfeasible\n\n# Primal solution values\nNone\n").status ==
          SolveStatus::kInfeasible);
    CHECK(parse_solution("Model status\nTime limit reached\n\n# Primal solution values\nNone\n").status ==
          SolveStatus::kTimeout);
  }

  TEST_CASE("XML solution format") {
    const std::string text =
        "<?xml version=\"1.0\"?>\n<CPLEXSolution><header objectiveValue=\"2.5\" "
        "solutionStatusString=\"integer optimal solution\" MIPRelativeGap=\"0.001\"/>"
        "<variables><variable name=\"x\" index=\"0\" value=\"2.5\"/></variables></CPLEXSolution>\n";
    const auto s = parse_solution(text);
    CHECK(s.status == SolveStatus::kOptimal);
    CHECK(s.gap == 0.001);
    CHECK(s.assignment.at("x") == 2.5);
  }

  TEST_CASE("status keywords") {
    CHECK(interpret_status("Optimal", true) == SolveStatus::kOptimal);
    CHECK(interpret_status("integer optimal solution", true) == SolveStatus::kOptimal);
    CHECK(interpret_status("Time limit reached", true) == SolveStatus::kFeasible);
    CHECK(interpret_status("Time limit reached", false) == SolveStatus::kTimeout);
    CHECK(interpret_status("integer infeasible", false) == SolveStatus::kInfeasible);
    CHECK_THROWS_AS_CODE(interpret_status("banana", false), ErrorCode::kSolverOutput);
    CHECK(parse_solve_status(to_string(SolveStatus::kFeasible)) == SolveStatus::kFeasible);
  }

  TEST_CASE("external solver command template") {
    MipProblem p;
    const VarId x = p.add_variable("x(1)", VarType::kContinuous, 0, 10);
    p.add_constraint("c", LinearExpr().add(x, 1), Relation::kGreaterEqual, 3);
    p.set_objective(LinearExpr().add(x, 1));
    SolveOptions o;
    o.solver_command = "test -s {lp} && printf '# status optimal\\nx_1_ 3\\n' > {sol}";
    const MipSolution s = solve_external(p, o);
    CHECK(s.status == SolveStatus::kOptimal);
    CHECK(s.assignment.at("x(1)") == 3);
    CHECK(s.objective == 3);
  }

  TEST_CASE("external solver errors") {
    MipProblem p;
    const VarId x = p.add_variable("x", VarType::kContinuous, 0, 10);
    p.set_objective(LinearExpr().add(x, 1));
    SolveOptions o;
    CHECK_THROWS_AS_CODE(solve_external(p, o), ErrorCode::kSolverNotFound);
    o.solver_command = "/nonexistent/solver {lp} {sol}";
    CHECK_THROWS_AS_CODE(solve_external(p, o), ErrorCode::kSolverNotFound);
    o.solver_command = "true";
    CHECK_THROWS_AS_CODE(solve_external(p, o), ErrorCode::kSolverOutput);
    o.time_limit = 0;
    CHECK_THROWS_AS_CODE(solve_external(p, o), ErrorCode::kInvalidParams);
  }

  TEST_CASE("HiGHS end to end") {
    if (highs_command().empty()) {
      MESSAGE("HiGHS not configured; skipped");
      return;
    }
    SolveOptions o;
    o.solver_command = highs_command();
    o.time_limit = 60;
    {
      MipProblem p;
      const VarId x = p.add_variable("x", VarType::kInteger, 0, 10);
      p.add_constraint("c", LinearExpr().add(x, 2), Relation::kGreaterEqual, 5);
      p.set_objective(LinearExpr().add(x, 1));
      const auto s = solve_external(p, o);
      REQUIRE(s.status == SolveStatus::kOptimal);
      CHECK(s.objective == doctest::Approx(3));
    }
    {
      MipProblem p;
      const VarId x = p.add_variable("x", VarType::kContinuous, 0, 10);
      p.add_constraint("lo", LinearExpr().add(x, 1), Relation::kGreaterEqual, 2);
      p.add_constraint("hi", LinearExpr().add(x, 1), Relation::kLessEqual, 1);
      p.set_objective(LinearExpr().add(x, 1));
      CHECK(solve_external(p, o).status == SolveStatus::kInfeasible);
    }
    for (const char* name : {"path3", "cross"}) {
      CAPTURE(name);
      const MetroGraph g = prepare_graph(load_fixture(name));
      const ModelBuild m = model_for(g, 4, {3, 2, 1});
      const auto ext = solve_external(m.problem, o);
      const auto exact = solve_exact_tiny(m.problem, m.registry);
      REQUIRE(ext.status == SolveStatus::kOptimal);
      REQUIRE(exact.status == SolveStatus::kOptimal);
      CHECK(ext.objective == doctest::Approx(exact.objective).epsilon(1e-6));
    }
  }
}
