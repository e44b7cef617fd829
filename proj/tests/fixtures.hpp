#pragma once

#include "wayfind/environment.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wayfind::testing {

inline Polygon rect(double x0, double y0, double x1, double y1) {
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

inline Floor box_floor(std::string id, double width, double height, std::vector<Polygon> obstacles = {}) {
  Floor f;
  f.id = std::move(id);
  f.outline = rect(0, 0, width, height);
  f.obstacles = std::move(obstacles);
  return f;
}

inline Sign make_sign(SignId id, const std::string& floor, Vec3 center, Vec2 normal, double width = 1.0,
                      double height = 0.5, ObjectClass cls = ObjectClass::signage,
                      std::vector<SignEntry> entries = {}) {
  Sign s;
  s.id = id;
  s.floor = floor;
  s.center = center;
  s.normal = normal.normalized();
  s.width = width;
  s.height = height;
  s.face_color = Vec3(0.9, 0.1, 0.1);
  s.object_class = cls;
  s.entries = std::move(entries);
  return s;
}

inline SignEntry at_target(std::string label) { return {std::move(label), SignEntry::Action::at_target, {}}; }

inline SignEntry direct_to(std::string label, std::string goal) {
  return {std::move(label), SignEntry::Action::direct_to, std::move(goal)};
}

/// One empty rectangular floor with the given signs, indexed and ready to use.
inline Environment room(double width, double height, std::vector<Sign> signs = {},
                        std::vector<Polygon> obstacles = {}) {
  Environment env;
  env.floors.push_back(box_floor("f", width, height, std::move(obstacles)));
  env.signs = std::move(signs);
  env.base_points.push_back({"b0", "f", Vec2(width / 2, height / 2), 0.0});
  env.build_index();
  return env;
}

}  // namespace wayfind::testing
