#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace wayfind {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Point3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2 = Point2<double>;
using Vec3 = Point3<double>;

/// Closed polygon given by its vertices; the closing edge is implicit.
template <typename Scalar>
using Polygon2 = std::vector<Point2<Scalar>, Eigen::aligned_allocator<Point2<Scalar>>>;
using Polygon = Polygon2<double>;

template <typename Scalar>
struct Segment2 {
  Point2<Scalar> a;
  Point2<Scalar> b;
};
using Segment = Segment2<double>;

struct Box2 {
  Vec2 min;
  Vec2 max;
};

template <typename Scalar>
inline Scalar cross2(const Point2<Scalar>& u, const Point2<Scalar>& v) {
  return u.x() * v.y() - u.y() * v.x();
}

template <typename Scalar>
inline Scalar orient(const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
  return cross2<Scalar>(b - a, c - a);
}

template <typename Scalar>
inline Point2<Scalar> rotate(const Point2<Scalar>& v, Scalar radians) {
  const Scalar c = std::cos(radians), s = std::sin(radians);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// Left-hand perpendicular (counterclockwise quarter turn).
template <typename Scalar>
inline Point2<Scalar> perp(const Point2<Scalar>& v) {
  return {-v.y(), v.x()};
}

template <typename Scalar>
inline Scalar signed_area(const Polygon2<Scalar>& poly) {
  Scalar sum = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    sum += cross2<Scalar>(poly[i], poly[(i + 1) % n]);
  }
  return sum / 2;
}

/// Even-odd crossing test. Boundary points may land on either side.
template <typename Scalar>
inline bool point_in_polygon(const Polygon2<Scalar>& poly, const Point2<Scalar>& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

template <typename Scalar>
inline Point2<Scalar> closest_point_on_segment(const Segment2<Scalar>& s, const Point2<Scalar>& p) {
  const Point2<Scalar> d = s.b - s.a;
  const Scalar len2 = d.squaredNorm();
  if (len2 <= Scalar(0)) return s.a;
  const Scalar t = std::clamp((p - s.a).dot(d) / len2, Scalar(0), Scalar(1));
  return s.a + t * d;
}

template <typename Scalar>
inline Scalar distance_to_segment(const Segment2<Scalar>& s, const Point2<Scalar>& p) {
  return (p - closest_point_on_segment(s, p)).norm();
}

template <typename Scalar>
inline Scalar distance_to_polygon_boundary(const Polygon2<Scalar>& poly, const Point2<Scalar>& p) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    best = std::min(best, distance_to_segment<Scalar>({poly[i], poly[(i + 1) % n]}, p));
  }
  return best;
}

/// Closed-segment intersection, touching endpoints and collinear overlap included.
template <typename Scalar>
inline bool segments_intersect(const Segment2<Scalar>& s, const Segment2<Scalar>& t) {
  const Scalar d1 = orient(t.a, t.b, s.a);
  const Scalar d2 = orient(t.a, t.b, s.b);
  const Scalar d3 = orient(s.a, s.b, t.a);
  const Scalar d4 = orient(s.a, s.b, t.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  if (d1 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (d2 == 0 && on_segment(t.a, t.b, s.b)) return true;
  if (d3 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (d4 == 0 && on_segment(s.a, s.b, t.b)) return true;
  return false;
}

/// Parameter along ray `origin + t * dir` where it meets segment `s`, if t >= 0.
template <typename Scalar>
inline std::optional<Scalar> ray_segment_hit(const Point2<Scalar>& origin, const Point2<Scalar>& dir,
                                             const Segment2<Scalar>& s) {
  const Point2<Scalar> e = s.b - s.a;
  const Scalar denom = cross2<Scalar>(dir, e);
  if (denom == Scalar(0)) return std::nullopt;
  const Point2<Scalar> w = s.a - origin;
  const Scalar t = cross2<Scalar>(w, e) / denom;
  const Scalar u = cross2<Scalar>(w, dir) / denom;
  if (t < Scalar(0) || u < Scalar(0) || u > Scalar(1)) return std::nullopt;
  return t;
}

/// True when the segment crosses the open interior of the axis-aligned box,
/// i.e. the clipped part has positive length and is not confined to the box boundary.
bool segment_crosses_open_box(const Segment& s, const Box2& box, double eps = 1e-12);

/// Positive-area overlap between a simple polygon and an open axis-aligned box.
bool polygon_overlaps_open_box(const Polygon& poly, const Box2& box);

/// Open box lies completely inside the closed polygon.
bool box_inside_polygon(const Polygon& poly, const Box2& box);

bool polygon_is_simple(const Polygon& poly);

Box2 bounding_box(const Polygon& poly);

/// Edges of a polygon as segments, closing edge included.
std::vector<Segment> polygon_edges(const Polygon& poly);

}  // namespace wayfind
