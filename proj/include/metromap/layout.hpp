#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "metromap/model_builder.hpp"
#include "metromap/solver.hpp"

namespace metromap {

struct Provenance {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  double gap = 0.0;
  int rounds = 0;
  std::size_t planarity_pairs = 0;
};

struct Layout {
  Layout(OrientationSystem sys, ModelParams p) : system(std::move(sys)), params(p) {}

  std::map<std::string, Point, std::less<>> coords;  // vertex id -> schematic position
  OrientationSystem system;
  ModelParams params;
  Provenance provenance;

  // Position of `v`; throws kMissingCoordinates.
  Point position(const MetroGraph& graph, VertexIndex v) const;
};

struct MetricsReport {
  double bend_cost = 0.0;
  int bend_count = 0;
  int sector_deviation_total = 0;
  double sector_deviation_per_edge = 0.0;
  double distortion_per_edge = 0.0;  // degrees
  double total_length = 0.0;
  double runtime_seconds = 0.0;
};

struct CheckResult {
  bool passed = true;
  double worst = 0.0;  // largest violation found
  std::vector<std::string> witnesses;
};

struct VerificationReport {
  CheckResult parallel;    // (a) edges follow an orientation
  CheckResult length;      // (b) edges at least L_min long
  CheckResult separation;  // (c) non-adjacent edges separated by d_min
  CheckResult embedding;   // (d) cyclic neighbor orders preserved

  bool ok() const { return parallel.passed && length.passed && separation.passed && embedding.passed; }
  std::string summary() const;
};

inline constexpr double kGeometryTolerance = 1e-6;

Layout extract_layout(const MipSolution& solution, const VariableRegistry& registry,
                      const MipProblem& problem, const MetroGraph& graph,
                      const OrientationSystem& system, const ModelParams& params);

VerificationReport verify_hard_constraints(const Layout& layout, const MetroGraph& graph);

// Direction index in [0, 2k) of every edge u -> v in the layout.
std::vector<int> realized_directions(const Layout& layout, const MetroGraph& graph);

// `graph` carries the input coordinates the layout was computed from.
MetricsReport compute_metrics(const Layout& layout, const MetroGraph& graph);

// Non-adjacent edge pairs whose drawings intersect or are closer than the
// separation rule allows.
std::vector<EdgePair> planarity_violations(const Layout& layout, const MetroGraph& graph);

using MipSolveFn = std::function<MipSolution(const ModelBuild&)>;

struct LazyOptions {
  bool lazy = true;  // false: all non-adjacent pairs from the start
  int max_rounds = 20;
};

struct RoundInfo {
  std::size_t pairs = 0;
  double objective = 0.0;
  std::size_t new_violations = 0;
  double runtime_seconds = 0.0;
};

struct LazyResult {
  Layout layout;
  MetricsReport metrics;
  VerificationReport verification;
  std::vector<RoundInfo> rounds;
  std::vector<EdgePair> pairs;
  MipSolution solution;
  ModelBuild model;
};

// Solves with planarity rows added only for pairs that the previous round's
// layout violated. Throws kRoundBudget if violations remain after max_rounds
// and kNotSolved if a round yields no solution.
LazyResult solve_with_lazy_planarity(const MetroGraph& graph, const OrientationSystem& system,
                                     const ModelParams& params, const MipSolveFn& solve,
                                     const LazyOptions& options = {});

std::vector<EdgePair> all_nonadjacent_pairs(const MetroGraph& graph);

nlohmann::json layout_to_json(const Layout& layout, const MetricsReport* metrics = nullptr);
Layout layout_from_json(const nlohmann::json& doc);

nlohmann::json metrics_to_json(const MetricsReport& metrics);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& network, const Layout& layout,
                            const MetricsReport& metrics);

}  // namespace metromap
