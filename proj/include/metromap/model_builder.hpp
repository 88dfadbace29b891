#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "metromap/metro_graph.hpp"
#include "metromap/mip_problem.hpp"
#include "metromap/orientation.hpp"

namespace metromap {

struct ObjectiveWeights {
  double bends = 3.0;
  double topo = 2.0;
  double length = 1.0;

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

struct ModelParams {
  int k = 4;
  int s = 1;                     // admissible neighboring sectors on each side
  double min_edge_length = 1.0;  // L_min
  double min_separation = 1.0;   // d_min
  double coord_bound = 0.0;      // |x|, |y| <= coord_bound
  double big_m = 0.0;
  ObjectiveWeights weights;

  // Defaults for `graph`: coord_bound = 4 m L_min, big_m = max(8, 3k) * coord_bound.
  static ModelParams defaults(const MetroGraph& graph, int k, int s = 1, double l_min = 1.0,
                              double d_min = 1.0, ObjectiveWeights weights = {});

  // Recomputes coord_bound and big_m from the current k, L_min and edge count.
  void derive_bounds(std::size_t edge_count);
  void validate() const;
};

// Per-edge direction bookkeeping. Direction numbers are reduced into [0, 2k).
struct EdgeDirectionVars {
  EdgeIndex edge = 0;
  int original_sector = 0;               // sec_u(v) for the stored orientation u -> v
  std::vector<int> offsets;              // -s .. s
  std::vector<int> direction_numbers;    // (sec + offset) mod 2k
  std::vector<VarId> alpha;              // one binary per admissible direction
  VarId dir = 0;                         // integer, equals Σ direction_number * alpha
  VarId xi = 0;                          // sector deviation
  VarId lambda = 0;                      // edge length
};

struct BendVars {
  std::string line;
  VertexIndex u1 = 0, u2 = 0, u3 = 0;
  VarId theta = 0;
  VarId delta1 = 0;
  VarId delta2 = 0;
};

struct PairVars {
  EdgeIndex first = 0;
  EdgeIndex second = 0;
  std::vector<VarId> gamma;  // one binary per direction 0 .. 2k-1
};

// Maps every semantic model quantity to its solver variable.
class VariableRegistry {
 public:
  std::vector<VarId> x, y;                  // per vertex
  std::vector<std::vector<VarId>> z, z_ortho;  // [vertex][orientation]
  std::vector<EdgeDirectionVars> edges;     // per edge
  std::vector<std::vector<VarId>> beta;     // [vertex][position]; empty below degree 2
  std::vector<BendVars> bends;
  std::vector<PairVars> pairs;

  // Semantic key of every variable, indexed by VarId.
  std::vector<std::string> keys;

  nlohmann::json to_json(const MipProblem& problem) const;
};

struct ModelBuild {
  MipProblem problem;
  VariableRegistry registry;
  LinearExpr cost_bends;
  LinearExpr cost_topo;
  LinearExpr cost_length;
};

using EdgePair = std::pair<EdgeIndex, EdgeIndex>;

// Builds the full model. `graph` must be planarized and embedded.
ModelBuild build_model(const MetroGraph& graph, const OrientationSystem& system,
                       const ModelParams& params, const std::vector<EdgePair>& pairs = {});

// The individual constraint families. They append to `build` and are called
// in this order by build_model.
void add_coordinate_system(ModelBuild& build, const MetroGraph& graph,
                           const OrientationSystem& system, const ModelParams& params);
void add_direction_constraints(ModelBuild& build, const MetroGraph& graph,
                               const OrientationSystem& system, const ModelParams& params);
void add_embedding_constraints(ModelBuild& build, const MetroGraph& graph, const ModelParams& params);
void add_planarity_constraints(ModelBuild& build, const MetroGraph& graph,
                               const OrientationSystem& system, const ModelParams& params,
                               const std::vector<EdgePair>& pairs);
void add_bend_costs(ModelBuild& build, const MetroGraph& graph, const ModelParams& params);
void add_topographicity(ModelBuild& build, const MetroGraph& graph, const ModelParams& params);
void add_compactness(ModelBuild& build, const MetroGraph& graph, const ModelParams& params);
void assemble_objective(ModelBuild& build, const ModelParams& params);

// Direction of the edge `e` when traversed starting at `from`, as a linear
// expression in the model variables (value in [0, 2k)).
LinearExpr direction_expr(const ModelBuild& build, const MetroGraph& graph, EdgeIndex e,
                          VertexIndex from, int k);

// All admissible direction numbers of one edge in the stored orientation.
std::vector<int> admissible_directions(int original_sector, int s, int k);

}  // namespace metromap
