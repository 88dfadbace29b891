#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "metromap/metro_graph.hpp"

namespace metromap {

enum class SystemKind { kAligned, kRegular, kIrregular, kCustom };

std::string_view to_string(SystemKind kind);
SystemKind parse_system_kind(std::string_view text);

// An ordered set of k edge orientations 0 <= c_1 < ... < c_k < π.
class OrientationSystem {
 public:
  static OrientationSystem aligned(int k);
  // Regular system containing `offset` (any real; reduced modulo π/k).
  static OrientationSystem regular(double offset, int k);
  static OrientationSystem irregular(std::vector<double> angles);
  static OrientationSystem custom(std::vector<double> angles);
  // Validates `angles` against the invariants of `kind`.
  static OrientationSystem from_angles(SystemKind kind, std::vector<double> angles);

  int k() const { return static_cast<int>(angles_.size()); }
  SystemKind kind() const { return kind_; }
  std::span<const double> angles() const { return angles_; }
  double angle(int i) const { return angles_.at(static_cast<std::size_t>(i)); }

  // The 2k drawing directions: φ_j = c_{j+1} for j < k, c_{j-k+1} + π otherwise.
  std::vector<double> directions() const;
  double direction(int j) const;

 private:
  OrientationSystem(SystemKind kind, std::vector<double> angles)
      : kind_(kind), angles_(std::move(angles)) {}

  SystemKind kind_ = SystemKind::kCustom;
  std::vector<double> angles_;
};

struct DistortionReport {
  double total = 0.0;
  std::vector<double> per_edge;  // radians, each <= π/2
  std::vector<int> assignment;   // closest orientation index per edge

  double mean() const { return per_edge.empty() ? 0.0 : total / static_cast<double>(per_edge.size()); }
};

// Circular distance between two slopes in [0, π); result in [0, π/2].
double angular_distance(double a, double b);

std::vector<double> edge_slopes(const MetroGraph& graph);

DistortionReport distortion(std::span<const double> slopes, const OrientationSystem& system);
DistortionReport distortion(const MetroGraph& graph, const OrientationSystem& system);

OrientationSystem aligned_system(int k);

// Minimum-distortion regular system. Only systems containing an input slope
// are examined, which is enough to find a global optimum.
OrientationSystem best_regular_rotation(std::span<const double> slopes, int k);
OrientationSystem best_regular_rotation(const MetroGraph& graph, int k);

enum class ClusterObjective {
  kMedianL1,  // matches the distortion measure
  kMeanL2,    // classic k-means representatives
};

// Exact clustering of the slopes into k circular arcs; one orientation per arc.
OrientationSystem best_irregular(std::span<const double> slopes, int k,
                                 ClusterObjective objective = ClusterObjective::kMedianL1);
OrientationSystem best_irregular(const MetroGraph& graph, int k,
                                 ClusterObjective objective = ClusterObjective::kMedianL1);

// Index of the direction closest to `direction` (radians, any value);
// ties go to the smaller index.
int sector_of(const OrientationSystem& system, double direction);

// {"kind": "regular", "angles": [...]} with angles in radians.
nlohmann::json system_to_json(const OrientationSystem& system);
OrientationSystem system_from_json(const nlohmann::json& doc);

namespace detail {

// Distortion of the regular system with offset c for every candidate offset,
// computed with a sorted sweep. Returned in candidate order.
std::vector<double> regular_distortion_sweep(std::span<const double> slopes, int k,
                                             std::span<const double> offsets);

}  // namespace detail

}  // namespace metromap
