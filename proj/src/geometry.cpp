#include "metromap/geometry.hpp"

#include <algorithm>

namespace metromap {

double wrap_angle(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double direction_angle(Point from, Point to) {
  return wrap_angle(std::atan2(to.y - from.y, to.x - from.x), kTwoPi);
}

double slope_angle(Point from, Point to) {
  return wrap_angle(std::atan2(to.y - from.y, to.x - from.x), kPi);
}

namespace {

int orientation_sign(Point a, Point b, Point c, double eps) {
  const Point ab = b - a;
  const Point ac = c - a;
  const double value = cross(ab, ac);
  const double scale = norm(ab) * norm(ac);
  if (std::abs(value) <= eps * std::max(scale, 1e-300)) return 0;
  return value > 0.0 ? 1 : -1;
}

// Parameter of p projected on [a, b].
double param_on(Point a, Point b, Point p) {
  const Point ab = b - a;
  return dot(p - a, ab) / dot(ab, ab);
}

bool within(double t) { return t >= -1e-12 && t <= 1.0 + 1e-12; }

}  // namespace

SegmentIntersection intersect_segments(Point a, Point b, Point c, Point d,
                                       double eps) {
  SegmentIntersection out;
  const int o1 = orientation_sign(a, b, c, eps);
  const int o2 = orientation_sign(a, b, d, eps);
  const int o3 = orientation_sign(c, d, a, eps);
  const int o4 = orientation_sign(c, d, b, eps);

  if (o1 == 0 && o2 == 0) {
    // Collinear (or degenerate). Compare parameter intervals on [a, b].
    const double tc = param_on(a, b, c);
    const double td = param_on(a, b, d);
    const double lo = std::max(0.0, std::min(tc, td));
    const double hi = std::min(1.0, std::max(tc, td));
    const double length = norm(b - a);
    const double overlap = (hi - lo) * length;
    const double tol = 1e-12 * std::max(1.0, length);
    if (overlap > tol) {
      out.relation = SegmentRelation::kCollinearOverlap;
      return out;
    }
    if (overlap >= -tol) {
      out.relation = SegmentRelation::kTouching;
      out.t_first = std::clamp(lo, 0.0, 1.0);
      out.point = a + out.t_first * (b - a);
      out.t_second = param_on(c, d, out.point);
    }
    return out;
  }

  if (o1 * o2 < 0 && o3 * o4 < 0) {
    const Point r = b - a;
    const Point s = d - c;
    const double denom = cross(r, s);
    out.relation = SegmentRelation::kProperCrossing;
    out.t_first = cross(c - a, s) / denom;
    out.t_second = cross(c - a, r) / denom;
    out.point = a + out.t_first * r;
    return out;
  }

  // Touching configurations: one orientation is zero and the point lies on
  // the other segment.
  auto touch = [&](Point p, Point s0, Point s1, int o) {
    if (o != 0) return false;
    const double t = param_on(s0, s1, p);
    return within(t);
  };
  if (touch(c, a, b, o1)) {
    out.relation = SegmentRelation::kTouching;
    out.point = c;
  } else if (touch(d, a, b, o2)) {
    out.relation = SegmentRelation::kTouching;
    out.point = d;
  } else if (touch(a, c, d, o3)) {
    out.relation = SegmentRelation::kTouching;
    out.point = a;
  } else if (touch(b, c, d, o4)) {
    out.relation = SegmentRelation::kTouching;
    out.point = b;
  } else {
    return out;
  }
  out.t_first = param_on(a, b, out.point);
  out.t_second = param_on(c, d, out.point);
  return out;
}

}  // namespace metromap
