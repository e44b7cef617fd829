#pragma once

#include "wayfind/camera.hpp"
#include "wayfind/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace wayfind {

using SignId = std::uint32_t;

enum class ObjectClass { signage, schedule, infrastructure };
enum class PortalKind { stairs, escalator, elevator };

struct Floor {
  std::string id;
  Polygon outline;  // counterclockwise, meters
  std::vector<Polygon> obstacles;
  double elevation = 0.0;

  /// Outline and obstacle edges.
  std::vector<Segment> walls() const;
  /// Inside the outline and outside every obstacle.
  bool walkable(const Vec2& p) const;
};

struct Portal {
  std::string id;
  std::string floor_a;
  std::string floor_b;
  Vec2 point_a = Vec2::Zero();
  Vec2 point_b = Vec2::Zero();
  double traversal_time = 1.0;
  PortalKind kind = PortalKind::stairs;
};

struct SignEntry {
  enum class Action { at_target, direct_to };
  std::string label;
  Action action = Action::at_target;
  std::string goal_point;  // set for direct_to
};

struct Sign {
  SignId id = 0;  // 0 is the background id in sign masks
  std::string floor;
  Vec3 center = Vec3::Zero();  // z above floor
  Vec2 normal = Vec2::UnitX();  // facing direction
  double width = 1.0;
  double height = 0.5;
  Vec3 face_color = Vec3::Ones();
  ObjectClass object_class = ObjectClass::signage;
  std::vector<SignEntry> entries;

  /// Horizontal unit axis along the sign face.
  Vec2 tangent() const { return perp<double>(normal); }
};

struct NamedPoint {
  std::string id;
  std::string floor;
  Vec2 position = Vec2::Zero();
  double heading_deg = 0.0;  // initial facing when used as a spawn point
};

struct Location {
  std::string floor;
  Vec2 point = Vec2::Zero();
};

struct SemanticModel {
  std::array<double, 3> relevance{1.0, 0.8, 0.6};  // indexed by ObjectClass
  double background_relevance = 0.05;

  double of(ObjectClass c) const { return relevance[static_cast<std::size_t>(c)]; }
};

struct Leg {
  std::optional<std::string> start;  // named point; empty continues from the previous leg end
  std::string target_label;
  Location target;
  double arrival_radius = 1.5;
};

struct Task {
  std::vector<Leg> legs;
};

/// Annotated scenario world. Immutable once `build_index` has run.
class Environment {
 public:
  std::vector<Floor> floors;
  std::vector<Portal> portals;
  std::vector<Sign> signs;
  std::vector<NamedPoint> base_points;
  std::vector<NamedPoint> goal_points;
  SemanticModel semantic_model;

  void build_index();

  const Floor* find_floor(const std::string& id) const;
  const Floor& floor(const std::string& id) const;
  const Sign* find_sign(SignId id) const;
  const Sign& sign(SignId id) const;
  const NamedPoint* find_goal_point(const std::string& id) const;
  const NamedPoint* find_base_point(const std::string& id) const;
  /// Base point or goal point.
  const NamedPoint* find_named_point(const std::string& id) const;
  /// Wall segments of a floor, cached by `build_index`.
  const std::vector<Segment>& walls(const std::string& floor_id) const;

 private:
  std::unordered_map<std::string, std::size_t> floor_index_;
  std::unordered_map<SignId, std::size_t> sign_index_;
  std::unordered_map<std::string, std::size_t> goal_index_;
  std::unordered_map<std::string, std::size_t> base_index_;
  std::vector<std::vector<Segment>> walls_;
};

/// Segment pq stays inside the outline and touches no obstacle. Symmetric in p and q.
bool line_of_sight(const Floor& floor, const Vec2& p, const Vec2& q);
bool line_of_sight(const Environment& env, const std::string& floor, const Vec2& p, const Vec2& q);

/// Signs on the pose's floor within `max_distance` of the eye, in front of the camera,
/// facing it, and with a clear line of sight to the sign face. Sorted by id.
std::vector<SignId> candidate_signs(const Environment& env, const CameraPose& pose, double max_distance);

std::string to_string(ObjectClass c);
std::string to_string(PortalKind k);

}  // namespace wayfind
