#pragma once

#include <cmath>
#include <numbers>

namespace metromap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angular comparisons throughout the library use this tolerance.
inline constexpr double kAngleTolerance = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

// (cos a, sin a) with round-off residues below 1e-15 set to zero, so that
// axis-parallel orientations yield exact zeros.
inline Point unit_vector(double angle) {
  Point u{std::cos(angle), std::sin(angle)};
  if (std::abs(u.x) < 1e-15) u.x = 0.0;
  if (std::abs(u.y) < 1e-15) u.y = 0.0;
  return u;
}

// Reduces `angle` into [0, period).
double wrap_angle(double angle, double period);

// Direction of the ray from -> to, in [0, 2π).
double direction_angle(Point from, Point to);

// Undirected slope of the segment, in [0, π).
double slope_angle(Point from, Point to);

enum class SegmentRelation {
  kDisjoint,
  kProperCrossing,    // interiors cross at a single point
  kTouching,          // an endpoint lies on the other segment (or endpoints coincide)
  kCollinearOverlap,  // collinear with a shared sub-segment of positive length
};

struct SegmentIntersection {
  SegmentRelation relation = SegmentRelation::kDisjoint;
  Point point;            // valid for kProperCrossing and kTouching
  double t_first = 0.0;   // parameter along the first segment
  double t_second = 0.0;  // parameter along the second segment
};

// Classifies how segments [a, b] and [c, d] meet. `eps` is a relative
// tolerance on orientation tests.
SegmentIntersection intersect_segments(Point a, Point b, Point c, Point d,
                                       double eps = 1e-12);

}  // namespace metromap
