#include "wayfind/environment.hpp"

#include <tuple>

namespace wayfind {

std::vector<Segment> Floor::walls() const {
  std::vector<Segment> out = polygon_edges(outline);
  for (const auto& obstacle : obstacles) {
    const auto edges = polygon_edges(obstacle);
    out.insert(out.end(), edges.begin(), edges.end());
  }
  return out;
}

bool Floor::walkable(const Vec2& p) const {
  if (!point_in_polygon<double>(outline, p)) return false;
  for (const auto& obstacle : obstacles) {
    if (point_in_polygon<double>(obstacle, p)) return false;
  }
  return true;
}

void Environment::build_index() {
  floor_index_.clear();
  sign_index_.clear();
  goal_index_.clear();
  base_index_.clear();
  walls_.clear();
  for (std::size_t i = 0; i < floors.size(); ++i) {
    floor_index_.emplace(floors[i].id, i);
    walls_.push_back(floors[i].walls());
  }
  for (std::size_t i = 0; i < signs.size(); ++i) sign_index_.emplace(signs[i].id, i);
  for (std::size_t i = 0; i < goal_points.size(); ++i) goal_index_.emplace(goal_points[i].id, i);
  for (std::size_t i = 0; i < base_points.size(); ++i) base_index_.emplace(base_points[i].id, i);
}

const Floor* Environment::find_floor(const std::string& id) const {
  auto it = floor_index_.find(id);
  return it == floor_index_.end() ? nullptr : &floors[it->second];
}

const Floor& Environment::floor(const std::string& id) const {
  if (const Floor* f = find_floor(id)) return *f;
  throw std::out_of_range("unknown floor '" + id + "'");
}

const Sign* Environment::find_sign(SignId id) const {
  auto it = sign_index_.find(id);
  return it == sign_index_.end() ? nullptr : &signs[it->second];
}

const Sign& Environment::sign(SignId id) const {
  if (const Sign* s = find_sign(id)) return *s;
  throw std::out_of_range("unknown sign id " + std::to_string(id));
}

const NamedPoint* Environment::find_goal_point(const std::string& id) const {
  auto it = goal_index_.find(id);
  return it == goal_index_.end() ? nullptr : &goal_points[it->second];
}

const NamedPoint* Environment::find_base_point(const std::string& id) const {
  auto it = base_index_.find(id);
  return it == base_index_.end() ? nullptr : &base_points[it->second];
}

const NamedPoint* Environment::find_named_point(const std::string& id) const {
  if (const NamedPoint* p = find_base_point(id)) return p;
  return find_goal_point(id);
}

const std::vector<Segment>& Environment::walls(const std::string& floor_id) const {
  auto it = floor_index_.find(floor_id);
  if (it == floor_index_.end()) throw std::out_of_range("unknown floor '" + floor_id + "'");
  return walls_[it->second];
}

bool line_of_sight(const Floor& floor, const Vec2& p, const Vec2& q) {
  // Canonical endpoint order makes the floating-point predicates symmetric.
  const bool swap = std::tie(q.x(), q.y()) < std::tie(p.x(), p.y());
  const Segment seg{swap ? q : p, swap ? p : q};

  if (!floor.walkable(seg.a) || !floor.walkable(seg.b)) return false;
  for (const auto& edge : polygon_edges(floor.outline)) {
    if (segments_intersect(seg, edge)) return false;
  }
  for (const auto& obstacle : floor.obstacles) {
    for (const auto& edge : polygon_edges(obstacle)) {
      if (segments_intersect(seg, edge)) return false;
    }
  }
  return true;
}

bool line_of_sight(const Environment& env, const std::string& floor, const Vec2& p, const Vec2& q) {
  const Floor* f = env.find_floor(floor);
  return f != nullptr && line_of_sight(*f, p, q);
}

namespace {
// Wall-mounted signs sit on a boundary; sight is tested to a point just in front of the face.
constexpr double kSignStandoff = 0.05;
}  // namespace

std::vector<SignId> candidate_signs(const Environment& env, const CameraPose& pose, double max_distance) {
  std::vector<SignId> out;
  const Floor* floor = env.find_floor(pose.floor);
  if (floor == nullptr) return out;
  const Vec3 eye = pose.eye();
  for (const auto& sign : env.signs) {
    if (sign.floor != pose.floor) continue;
    if ((sign.center - eye).norm() > max_distance) continue;
    const Vec2 view = sign.center.head<2>() - pose.position;
    if (view.dot(pose.heading) <= 0.0) continue;
    if (sign.normal.dot(view) >= 0.0) continue;
    const Vec2 face = sign.center.head<2>() + kSignStandoff * sign.normal;
    if (!line_of_sight(*floor, pose.position, face)) continue;
    out.push_back(sign.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::signage: return "signage";
    case ObjectClass::schedule: return "schedule";
    case ObjectClass::infrastructure: return "infrastructure";
  }
  return "signage";
}

std::string to_string(PortalKind k) {
  switch (k) {
    case PortalKind::stairs: return "stairs";
    case PortalKind::escalator: return "escalator";
    case PortalKind::elevator: return "elevator";
  }
  return "stairs";
}

}  // namespace wayfind
