#include "wayfind/geometry.hpp"

namespace wayfind {

bool segment_crosses_open_box(const Segment& s, const Box2& box, double eps) {
  // Liang-Barsky clip against the closed box.
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = s.b - s.a;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {s.a.x() - box.min.x(), box.max.x() - s.a.x(), s.a.y() - box.min.y(),
                       box.max.y() - s.a.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  if ((t1 - t0) * d.norm() <= eps) return false;
  // A chord of a convex box is interior unless it runs along one of the edges.
  const Vec2 mid = s.a + 0.5 * (t0 + t1) * d;
  return mid.x() > box.min.x() + eps && mid.x() < box.max.x() - eps && mid.y() > box.min.y() + eps &&
         mid.y() < box.max.y() - eps;
}

bool polygon_overlaps_open_box(const Polygon& poly, const Box2& box) {
  for (const auto& e : polygon_edges(poly)) {
    if (segment_crosses_open_box(e, box)) return true;
  }
  // No edge enters the interior, so the box is entirely inside or outside.
  return point_in_polygon<double>(poly, 0.5 * (box.min + box.max));
}

bool box_inside_polygon(const Polygon& poly, const Box2& box) {
  for (const auto& e : polygon_edges(poly)) {
    if (segment_crosses_open_box(e, box)) return false;
  }
  return point_in_polygon<double>(poly, 0.5 * (box.min + box.max));
}

bool polygon_is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (std::abs(signed_area<double>(poly)) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Segment ei{poly[i], poly[(i + 1) % n]};
    if ((ei.b - ei.a).squaredNorm() == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      const Segment ej{poly[j], poly[(j + 1) % n]};
      if (segments_intersect(ei, ej)) return false;
    }
  }
  return true;
}

Box2 bounding_box(const Polygon& poly) {
  Box2 box{Vec2::Constant(std::numeric_limits<double>::infinity()),
           Vec2::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& p : poly) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

std::vector<Segment> polygon_edges(const Polygon& poly) {
  std::vector<Segment> edges;
  edges.reserve(poly.size());
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    edges.push_back({poly[i], poly[(i + 1) % n]});
  }
  return edges;
}

}  // namespace wayfind
