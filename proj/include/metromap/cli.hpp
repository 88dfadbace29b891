#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "metromap/layout.hpp"
#include "metromap/model_builder.hpp"
#include "metromap/orientation.hpp"
#include "metromap/render.hpp"

namespace metromap {

// Solver command that selects the built-in enumeration oracle.
inline constexpr const char* kExactSolverCommand = "exact";

// Command template configured at build time; empty if no solver was found.
std::string default_solver_command();

struct RunConfig {
  std::filesystem::path input;
  int k = 4;
  SystemKind system_kind = SystemKind::kAligned;
  std::vector<double> angles;  // radians, custom systems only
  ObjectiveWeights weights;
  int s = 1;
  double min_edge_length = 1.0;
  double min_separation = 1.0;
  double time_limit = 300.0;
  double mip_gap = 1e-6;
  int threads = 1;
  std::string solver_command;  // empty: default_solver_command()
  std::filesystem::path out_dir = ".";
  bool lazy_planarity = true;

  void validate() const;
  std::string network() const { return input.stem().string(); }
  // File stem unique per (network, k, system, weights).
  std::string instance_name() const;
};

// Orientation system for `graph` as requested by `config`.
OrientationSystem derive_system(const MetroGraph& graph, const RunConfig& config);

struct LayoutRun {
  MetroGraph graph;  // planarized and embedded
  std::optional<LazyResult> result;
  std::string csv_row;
  std::string error;  // non-empty if the run failed before verification
  std::vector<std::filesystem::path> files;

  bool ok() const { return result && result->verification.ok(); }
};

// Full pipeline for one instance: orientation, model, lazy planarity solve,
// verification, metrics. Writes <instance>.lp, <instance>.layout.json and
// <instance>.csv into config.out_dir. Failures are reported in `error`.
LayoutRun run_layout(const RunConfig& config, std::stop_token stop = {});

// Exit-code returning command entry points.
int cmd_orient(const RunConfig& config, bool csv, std::ostream& out, std::ostream& err);
int cmd_layout(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_render(const std::filesystem::path& input, const std::filesystem::path& layout_json,
               const std::filesystem::path& out_dir, const RenderStyle& style, std::ostream& out,
               std::ostream& err);

struct BatchPlan {
  std::vector<std::filesystem::path> inputs;
  std::vector<int> ks{3, 4, 5};
  std::vector<SystemKind> kinds{SystemKind::kAligned, SystemKind::kRegular, SystemKind::kIrregular};
  std::vector<ObjectiveWeights> weights{{3, 2, 1}, {10, 5, 1}};
  int jobs = 1;
};

// Instances in output order: network, k, system kind, weights.
std::vector<RunConfig> expand_batch(const BatchPlan& plan, const RunConfig& base);

// Runs every instance with up to plan.jobs in parallel and writes batch.csv.
int cmd_batch(const BatchPlan& plan, const RunConfig& base, std::ostream& out, std::ostream& err);

}  // namespace metromap
