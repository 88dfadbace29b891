#include "metromap/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metromap/errors.hpp"

namespace metromap {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kAligned: return "aligned";
    case SystemKind::kRegular: return "regular";
    case SystemKind::kIrregular: return "irregular";
    case SystemKind::kCustom: return "custom";
  }
  return "custom";
}

SystemKind parse_system_kind(std::string_view text) {
  if (text == "aligned" || text == "A") return SystemKind::kAligned;
  if (text == "regular" || text == "R") return SystemKind::kRegular;
  if (text == "irregular" || text == "I") return SystemKind::kIrregular;
  if (text == "custom" || text == "C") return SystemKind::kCustom;
  throw Error(ErrorCode::kInvalidOrientation, "unknown system kind '" + std::string(text) + "'");
}

namespace {

void check_angles(const std::vector<double>& angles) {
  if (angles.empty()) throw Error(ErrorCode::kInvalidOrientation, "orientation system is empty");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < kPi)) {
      throw Error(ErrorCode::kInvalidOrientation, "orientation outside [0, pi)");
    }
    if (i > 0 && angles[i] - angles[i - 1] <= kAngleTolerance) {
      throw Error(ErrorCode::kInvalidOrientation, "orientations must be strictly increasing");
    }
  }
  if (angles.size() > 1 && angles.front() + kPi - angles.back() <= kAngleTolerance) {
    throw Error(ErrorCode::kInvalidOrientation, "first and last orientation coincide modulo pi");
  }
}

bool is_regular(const std::vector<double>& angles) {
  const double step = kPi / static_cast<double>(angles.size());
  for (std::size_t i = 1; i < angles.size(); ++i) {
    if (std::abs(angles[i] - angles[i - 1] - step) > kAngleTolerance) return false;
  }
  return true;
}

}  // namespace

OrientationSystem OrientationSystem::aligned(int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidOrientation, "aligned systems need k >= 2");
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) angles.push_back(i * kPi / k);
  return OrientationSystem(SystemKind::kAligned, std::move(angles));
}

OrientationSystem OrientationSystem::regular(double offset, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidOrientation, "regular systems need k >= 1");
  const double step = kPi / k;
  const double first = wrap_angle(offset, step);
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) {
    angles.push_back(std::min(first + i * step, std::nextafter(kPi, 0.0)));
  }
  return OrientationSystem(SystemKind::kRegular, std::move(angles));
}

OrientationSystem OrientationSystem::irregular(std::vector<double> angles) {
  return from_angles(SystemKind::kIrregular, std::move(angles));
}

OrientationSystem OrientationSystem::custom(std::vector<double> angles) {
  for (double& a : angles) a = wrap_angle(a, kPi);
  std::sort(angles.begin(), angles.end());
  return from_angles(SystemKind::kCustom, std::move(angles));
}

OrientationSystem OrientationSystem::from_angles(SystemKind kind, std::vector<double> angles) {
  check_angles(angles);
  if (kind == SystemKind::kRegular || kind == SystemKind::kAligned) {
    if (!is_regular(angles)) {
      throw Error(ErrorCode::kInvalidOrientation, "regular system needs spacing pi/k");
    }
    if (kind == SystemKind::kAligned && angles.front() != 0.0) {
      throw Error(ErrorCode::kInvalidOrientation, "aligned system needs c_1 = 0");
    }
  }
  return OrientationSystem(kind, std::move(angles));
}

std::vector<double> OrientationSystem::directions() const {
  std::vector<double> out;
  out.reserve(angles_.size() * 2);
  for (double a : angles_) out.push_back(a);
  for (double a : angles_) out.push_back(a + kPi);
  return out;
}

double OrientationSystem::direction(int j) const {
  const int kk = k();
  return j < kk ? angle(j) : angle(j - kk) + kPi;
}

// _____________________________________________________________________________
double angular_distance(double a, double b) {
  const double d = std::abs(wrap_angle(a, kPi) - wrap_angle(b, kPi));
  return std::min(d, kPi - d);
}

std::vector<double> edge_slopes(const MetroGraph& graph) {
  std::vector<double> out;
  out.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) out.push_back(e.slope);
  return out;
}

DistortionReport distortion(std::span<const double> slopes, const OrientationSystem& system) {
  if (slopes.empty()) throw Error(ErrorCode::kEmptyGraph, "distortion of an empty edge set");
  DistortionReport report;
  report.per_edge.reserve(slopes.size());
  report.assignment.reserve(slopes.size());
  for (double slope : slopes) {
    double best = std::numeric_limits<double>::infinity();
    int best_index = 0;
    for (int i = 0; i < system.k(); ++i) {
      const double d = angular_distance(system.angle(i), slope);
      if (d < best - kAngleTolerance) best_index = i;
      best = std::min(best, d);
    }
    report.per_edge.push_back(best);
    report.assignment.push_back(best_index);
    report.total += best;
  }
  return report;
}

DistortionReport distortion(const MetroGraph& graph, const OrientationSystem& system) {
  return distortion(edge_slopes(graph), system);
}

OrientationSystem aligned_system(int k) { return OrientationSystem::aligned(k); }

// _____________________________________________________________________________
namespace detail {

std::vector<double> regular_distortion_sweep(std::span<const double> slopes, int k,
                                             std::span<const double> offsets) {
  const double width = kPi / k;
  const std::size_t m = slopes.size();
  std::vector<double> residues;
  residues.reserve(m);
  for (double s : slopes) residues.push_back(wrap_angle(s, width));
  std::sort(residues.begin(), residues.end());

  std::vector<double> doubled(residues);
  for (double r : residues) doubled.push_back(r + width);
  std::vector<double> prefix(doubled.size() + 1, 0.0);
  for (std::size_t i = 0; i < doubled.size(); ++i) prefix[i + 1] = prefix[i] + doubled[i];

  std::vector<double> out;
  out.reserve(offsets.size());
  for (double raw : offsets) {
    const double c = wrap_angle(raw, width);
    const auto start = static_cast<std::size_t>(
        std::lower_bound(residues.begin(), residues.end(), c) - residues.begin());
    const std::size_t stop = start + m;
    const auto half = static_cast<std::size_t>(
        std::upper_bound(doubled.begin() + static_cast<std::ptrdiff_t>(start),
                         doubled.begin() + static_cast<std::ptrdiff_t>(stop), c + width / 2) -
        doubled.begin());
    const double near = (prefix[half] - prefix[start]) - c * static_cast<double>(half - start);
    const double far =
        (c + width) * static_cast<double>(stop - half) - (prefix[stop] - prefix[half]);
    out.push_back(near + far);
  }
  return out;
}

}  // namespace detail

namespace {

bool better(double value, double best) {
  if (!std::isfinite(best)) return value < best;
  return value < best - 1e-12 * std::max(1.0, best);
}

}  // namespace

OrientationSystem best_regular_rotation(std::span<const double> slopes, int k) {
  if (slopes.empty()) throw Error(ErrorCode::kEmptyGraph, "no edges to rotate against");
  if (k < 2) throw Error(ErrorCode::kInvalidOrientation, "regular systems need k >= 2");
  const double width = kPi / k;
  std::vector<double> candidates;
  candidates.reserve(slopes.size());
  for (double s : slopes) candidates.push_back(wrap_angle(s, width));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> values;
  if (slopes.size() < 1000) {
    values.reserve(candidates.size());
    for (double c : candidates) {
      values.push_back(distortion(slopes, OrientationSystem::regular(c, k)).total);
    }
  } else {
    values = detail::regular_distortion_sweep(slopes, k, candidates);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (better(values[i], values[best])) best = i;
  }
  return OrientationSystem::regular(candidates[best], k);
}

OrientationSystem best_regular_rotation(const MetroGraph& graph, int k) {
  return best_regular_rotation(edge_slopes(graph), k);
}

// _____________________________________________________________________________
namespace {

struct WeightedPoints {
  std::vector<double> value;
  std::vector<double> weight;
};

// Contiguous-partition costs over one linearized (unwrapped) sequence.
class SegmentCost {
 public:
  SegmentCost(const WeightedPoints& pts, ClusterObjective objective)
      : pts_(pts), objective_(objective) {
    const std::size_t n = pts.value.size();
    w_.assign(n + 1, 0.0);
    s_.assign(n + 1, 0.0);
    q_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      w_[i + 1] = w_[i] + pts.weight[i];
      s_[i + 1] = s_[i] + pts.weight[i] * pts.value[i];
      q_[i + 1] = q_[i] + pts.weight[i] * pts.value[i] * pts.value[i];
    }
  }

  // Representative of points [a, b].
  double representative(std::size_t a, std::size_t b) const {
    if (objective_ == ClusterObjective::kMeanL2) {
      return (s_[b + 1] - s_[a]) / (w_[b + 1] - w_[a]);
    }
    return pts_.value[median(a, b)];
  }

  double cost(std::size_t a, std::size_t b) const {
    if (objective_ == ClusterObjective::kMeanL2) {
      const double w = w_[b + 1] - w_[a];
      const double s = s_[b + 1] - s_[a];
      return std::max(0.0, (q_[b + 1] - q_[a]) - s * s / w);
    }
    const std::size_t m = median(a, b);
    const double r = pts_.value[m];
    const double left = r * (w_[m + 1] - w_[a]) - (s_[m + 1] - s_[a]);
    const double right = (s_[b + 1] - s_[m + 1]) - r * (w_[b + 1] - w_[m + 1]);
    return left + right;
  }

 private:
  // Lower weighted median index of [a, b].
  std::size_t median(std::size_t a, std::size_t b) const {
    const double half = (w_[b + 1] - w_[a]) / 2.0;
    const double target = w_[a] + half;
    auto it = std::lower_bound(w_.begin() + static_cast<std::ptrdiff_t>(a + 1),
                               w_.begin() + static_cast<std::ptrdiff_t>(b + 2), target - 1e-12);
    return static_cast<std::size_t>(it - w_.begin()) - 1;
  }

  const WeightedPoints& pts_;
  ClusterObjective objective_;
  std::vector<double> w_, s_, q_;
};

struct Clustering {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> representatives;
};

// Exact DP over contiguous partitions of a linear sequence into k groups.
Clustering cluster_linear(const WeightedPoints& pts, int k, ClusterObjective objective) {
  const std::size_t n = pts.value.size();
  const auto kk = static_cast<std::size_t>(k);
  SegmentCost seg(pts, objective);
  const double inf = std::numeric_limits<double>::infinity();
  // best[j][b]: cost of splitting points [0, b] into j + 1 groups.
  std::vector<std::vector<double>> best(kk, std::vector<double>(n, inf));
  std::vector<std::vector<std::size_t>> split(kk, std::vector<std::size_t>(n, 0));
  for (std::size_t b = 0; b < n; ++b) best[0][b] = seg.cost(0, b);
  for (std::size_t j = 1; j < kk; ++j) {
    for (std::size_t b = j; b < n; ++b) {
      for (std::size_t a = j; a <= b; ++a) {
        const double value = best[j - 1][a - 1] + seg.cost(a, b);
        if (value < best[j][b]) {
          best[j][b] = value;
          split[j][b] = a;
        }
      }
    }
  }
  Clustering out;
  out.cost = best[kk - 1][n - 1];
  std::size_t b = n - 1;
  for (std::size_t j = kk; j-- > 0;) {
    const std::size_t a = j == 0 ? 0 : split[j][b];
    out.representatives.push_back(wrap_angle(seg.representative(a, b), kPi));
    if (j > 0) b = a - 1;
  }
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

}  // namespace

OrientationSystem best_irregular(std::span<const double> slopes, int k, ClusterObjective objective) {
  if (k < 1) throw Error(ErrorCode::kInvalidOrientation, "need k >= 1");
  std::vector<double> sorted;
  sorted.reserve(slopes.size());
  for (double s : slopes) sorted.push_back(wrap_angle(s, kPi));
  std::sort(sorted.begin(), sorted.end());

  WeightedPoints distinct;
  for (double s : sorted) {
    if (!distinct.value.empty() && s - distinct.value.back() <= kAngleTolerance) {
      distinct.weight.back() += 1.0;
    } else {
      distinct.value.push_back(s);
      distinct.weight.push_back(1.0);
    }
  }
  if (distinct.value.size() > 1 && distinct.value.front() + kPi - distinct.value.back() <= kAngleTolerance) {
    distinct.weight.front() += distinct.weight.back();
    distinct.value.pop_back();
    distinct.weight.pop_back();
  }
  const std::size_t n = distinct.value.size();
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewSlopes, "only " + std::to_string(n) +
                                              " distinct slopes for k = " + std::to_string(k));
  }

  Clustering best;
  WeightedPoints rotated;
  for (std::size_t cut = 0; cut < n; ++cut) {
    rotated.value.clear();
    rotated.weight.clear();
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = (cut + t) % n;
      rotated.value.push_back(distinct.value[i] + (cut + t >= n ? kPi : 0.0));
      rotated.weight.push_back(distinct.weight[i]);
    }
    Clustering c = cluster_linear(rotated, k, objective);
    if (better(c.cost, best.cost) ||
        (!better(best.cost, c.cost) && c.representatives < best.representatives)) {
      best = std::move(c);
    }
  }
  return OrientationSystem::irregular(std::move(best.representatives));
}

OrientationSystem best_irregular(const MetroGraph& graph, int k, ClusterObjective objective) {
  return best_irregular(edge_slopes(graph), k, objective);
}

// _____________________________________________________________________________
int sector_of(const OrientationSystem& system, double direction) {
  const double d = wrap_angle(direction, kTwoPi);
  int best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 2 * system.k(); ++j) {
    double diff = std::abs(d - system.direction(j));
    diff = std::min(diff, kTwoPi - diff);
    if (diff < best_distance - kAngleTolerance) {
      best = j;
      best_distance = diff;
    } else {
      best_distance = std::min(best_distance, diff);
    }
  }
  return best;
}

nlohmann::json system_to_json(const OrientationSystem& system) {
  nlohmann::json angles = nlohmann::json::array();
  for (double a : system.angles()) angles.push_back(a);
  return {{"kind", std::string(to_string(system.kind()))}, {"angles", angles}};
}

OrientationSystem system_from_json(const nlohmann::json& doc) {
  try {
    const SystemKind kind = parse_system_kind(doc.at("kind").get<std::string>());
    return OrientationSystem::from_angles(kind, doc.at("angles").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("orientation system: ") + e.what());
  }
}

}  // namespace metromap
