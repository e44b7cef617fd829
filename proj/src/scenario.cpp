#include "wayfind/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wayfind {

using json = nlohmann::json;

std::string to_string(const Issue& issue) {
  return (issue.path.empty() ? std::string("<document>") : issue.path) + ": " + issue.message;
}

namespace {

std::string describe(const std::vector<Issue>& issues) {
  std::string out = "invalid scenario";
  for (const auto& i : issues) out += "\n  " + to_string(i);
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

namespace {

// ---------------------------------------------------------------------------
// Schema reading

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw ValidationError({Issue{path, message}});
}

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) schema_error(child(path, key), "unknown key");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(child(path, key), "missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_error(path, "expected [x, y]");
  return {as_number(j[0], item(path, 0)), as_number(j[1], item(path, 1))};
}

Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) schema_error(path, "expected a 3-element array");
  return {as_number(j[0], item(path, 0)), as_number(j[1], item(path, 1)), as_number(j[2], item(path, 2))};
}

Polygon as_polygon(const json& j, const std::string& path) {
  as_array(j, path);
  Polygon poly;
  for (std::size_t i = 0; i < j.size(); ++i) poly.push_back(as_vec2(j[i], item(path, i)));
  return poly;
}

void read_number(const json& obj, const char* key, const std::string& path, double& out) {
  if (const auto it = obj.find(key); it != obj.end()) out = as_number(*it, child(path, key));
}

void read_int(const json& obj, const char* key, const std::string& path, int& out) {
  if (const auto it = obj.find(key); it != obj.end()) out = static_cast<int>(as_integer(*it, child(path, key)));
}

template <class Enum, std::size_t N>
Enum as_enum(const json& j, const std::string& path, const std::array<std::pair<const char*, Enum>, N>& names) {
  const std::string s = as_string(j, path);
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  std::string expected;
  for (const auto& [name, value] : names) expected += (expected.empty() ? "" : ", ") + std::string(name);
  schema_error(path, "unknown value '" + s + "' (expected one of " + expected + ")");
}

constexpr std::array<std::pair<const char*, ObjectClass>, 3> kObjectClasses{{
    {"signage", ObjectClass::signage},
    {"schedule", ObjectClass::schedule},
    {"infrastructure", ObjectClass::infrastructure},
}};
constexpr std::array<std::pair<const char*, PortalKind>, 3> kPortalKinds{{
    {"stairs", PortalKind::stairs},
    {"escalator", PortalKind::escalator},
    {"elevator", PortalKind::elevator},
}};
constexpr std::array<std::pair<const char*, SignEntry::Action>, 2> kActions{{
    {"at_target", SignEntry::Action::at_target},
    {"direct_to", SignEntry::Action::direct_to},
}};
constexpr std::array<std::pair<const char*, FrustumParams::VerticalOrigin>, 2> kOrigins{{
    {"top", FrustumParams::VerticalOrigin::top},
    {"bottom", FrustumParams::VerticalOrigin::bottom},
}};

Floor read_floor(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "outline", "obstacles", "elevation"});
  Floor f;
  f.id = as_string(require(j, "id", path), child(path, "id"));
  f.outline = as_polygon(require(j, "outline", path), child(path, "outline"));
  if (const auto it = j.find("obstacles"); it != j.end()) {
    const std::string p = child(path, "obstacles");
    as_array(*it, p);
    for (std::size_t i = 0; i < it->size(); ++i) f.obstacles.push_back(as_polygon((*it)[i], item(p, i)));
  }
  read_number(j, "elevation", path, f.elevation);
  return f;
}

Portal read_portal(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "floor_a", "floor_b", "point_a", "point_b", "traversal_time", "kind"});
  Portal p;
  p.id = as_string(require(j, "id", path), child(path, "id"));
  p.floor_a = as_string(require(j, "floor_a", path), child(path, "floor_a"));
  p.floor_b = as_string(require(j, "floor_b", path), child(path, "floor_b"));
  p.point_a = as_vec2(require(j, "point_a", path), child(path, "point_a"));
  p.point_b = as_vec2(require(j, "point_b", path), child(path, "point_b"));
  p.traversal_time = as_number(require(j, "traversal_time", path), child(path, "traversal_time"));
  if (const auto it = j.find("kind"); it != j.end()) p.kind = as_enum(*it, child(path, "kind"), kPortalKinds);
  return p;
}

SignEntry read_entry(const json& j, const std::string& path) {
  check_keys(j, path, {"label", "action", "goal_point"});
  SignEntry e;
  e.label = as_string(require(j, "label", path), child(path, "label"));
  e.action = as_enum(require(j, "action", path), child(path, "action"), kActions);
  if (const auto it = j.find("goal_point"); it != j.end()) e.goal_point = as_string(*it, child(path, "goal_point"));
  if (e.action == SignEntry::Action::direct_to && e.goal_point.empty()) {
    schema_error(child(path, "goal_point"), "direct_to entries need a goal_point");
  }
  if (e.action == SignEntry::Action::at_target && !e.goal_point.empty()) {
    schema_error(child(path, "goal_point"), "at_target entries take no goal_point");
  }
  return e;
}

Sign read_sign(const json& j, const std::string& path) {
  check_keys(j, path,
             {"id", "floor", "center", "normal", "facing_deg", "width", "height", "face_color", "object_class",
              "entries"});
  Sign s;
  const long long id = as_integer(require(j, "id", path), child(path, "id"));
  if (id < 0 || id > static_cast<long long>(std::numeric_limits<SignId>::max())) {
    schema_error(child(path, "id"), "sign id out of range");
  }
  s.id = static_cast<SignId>(id);
  s.floor = as_string(require(j, "floor", path), child(path, "floor"));
  s.center = as_vec3(require(j, "center", path), child(path, "center"));
  const bool has_normal = j.contains("normal");
  const bool has_facing = j.contains("facing_deg");
  if (has_normal == has_facing) schema_error(path, "give exactly one of normal or facing_deg");
  if (has_normal) {
    s.normal = as_vec2(j["normal"], child(path, "normal"));
  } else {
    const double deg = as_number(j["facing_deg"], child(path, "facing_deg"));
    const double r = deg * std::numbers::pi / 180.0;
    s.normal = {std::cos(r), std::sin(r)};
  }
  s.width = as_number(require(j, "width", path), child(path, "width"));
  s.height = as_number(require(j, "height", path), child(path, "height"));
  if (const auto it = j.find("face_color"); it != j.end()) s.face_color = as_vec3(*it, child(path, "face_color"));
  if (const auto it = j.find("object_class"); it != j.end()) {
    s.object_class = as_enum(*it, child(path, "object_class"), kObjectClasses);
  }
  if (const auto it = j.find("entries"); it != j.end()) {
    const std::string p = child(path, "entries");
    as_array(*it, p);
    for (std::size_t i = 0; i < it->size(); ++i) s.entries.push_back(read_entry((*it)[i], item(p, i)));
  }
  return s;
}

NamedPoint read_named_point(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "floor", "position", "heading_deg"});
  NamedPoint p;
  p.id = as_string(require(j, "id", path), child(path, "id"));
  p.floor = as_string(require(j, "floor", path), child(path, "floor"));
  p.position = as_vec2(require(j, "position", path), child(path, "position"));
  read_number(j, "heading_deg", path, p.heading_deg);
  return p;
}

SemanticModel read_semantic(const json& j, const std::string& path) {
  check_keys(j, path, {"relevance", "background_relevance"});
  SemanticModel m;
  if (const auto it = j.find("relevance"); it != j.end()) {
    const std::string p = child(path, "relevance");
    if (!it->is_object()) schema_error(p, "expected an object");
    for (const auto& [key, value] : it->items()) {
      const ObjectClass c = as_enum(json(key), child(p, key), kObjectClasses);
      m.relevance[static_cast<std::size_t>(c)] = as_number(value, child(p, key));
    }
  }
  read_number(j, "background_relevance", path, m.background_relevance);
  return m;
}

Leg read_leg(const json& j, const std::string& path) {
  check_keys(j, path, {"start", "target_label", "target", "arrival_radius"});
  Leg leg;
  if (const auto it = j.find("start"); it != j.end() && !it->is_null()) leg.start = as_string(*it, child(path, "start"));
  leg.target_label = as_string(require(j, "target_label", path), child(path, "target_label"));
  const std::string tp = child(path, "target");
  const json& target = require(j, "target", path);
  check_keys(target, tp, {"floor", "point"});
  leg.target.floor = as_string(require(target, "floor", tp), child(tp, "floor"));
  leg.target.point = as_vec2(require(target, "point", tp), child(tp, "point"));
  read_number(j, "arrival_radius", path, leg.arrival_radius);
  return leg;
}

void read_config(const json& j, const std::string& path, SimulationConfig& c) {
  check_keys(j, path,
             {"dt", "perception_interval", "leg_timeout", "replications", "master_seed", "agents_per_replication",
              "eye_height", "waypoint_tolerance", "cell_size", "spawn_spacing", "kappa", "camera", "frustum",
              "fusion", "social_force"});
  read_number(j, "dt", path, c.dt);
  read_number(j, "perception_interval", path, c.perception_interval);
  read_number(j, "leg_timeout", path, c.leg_timeout);
  read_int(j, "replications", path, c.replications);
  if (const auto it = j.find("master_seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      schema_error(child(path, "master_seed"), "expected a non-negative integer");
    }
    c.master_seed = it->get<std::uint64_t>();
  }
  read_int(j, "agents_per_replication", path, c.agents_per_replication);
  read_number(j, "eye_height", path, c.eye_height);
  read_number(j, "waypoint_tolerance", path, c.waypoint_tolerance);
  read_number(j, "cell_size", path, c.cell_size);
  read_number(j, "spawn_spacing", path, c.spawn_spacing);
  if (const auto it = j.find("kappa"); it != j.end() && !it->is_null()) c.kappa = as_number(*it, child(path, "kappa"));

  if (const auto it = j.find("camera"); it != j.end()) {
    const std::string p = child(path, "camera");
    check_keys(*it, p,
               {"horizontal_fov_deg", "raster_width", "raster_height", "max_view_distance", "wall_gray",
                "floor_gray", "noise_amplitude"});
    auto& cam = c.camera;
    read_number(*it, "horizontal_fov_deg", p, cam.horizontal_fov_deg);
    read_int(*it, "raster_width", p, cam.raster_width);
    read_int(*it, "raster_height", p, cam.raster_height);
    read_number(*it, "max_view_distance", p, cam.max_view_distance);
    read_number(*it, "wall_gray", p, cam.wall_gray);
    read_number(*it, "floor_gray", p, cam.floor_gray);
    read_number(*it, "noise_amplitude", p, cam.noise_amplitude);
  }
  if (const auto it = j.find("frustum"); it != j.end()) {
    const std::string p = child(path, "frustum");
    check_keys(*it, p, {"gaussian_mu", "gaussian_sigma", "beta_alpha", "beta_beta", "vertical_origin"});
    auto& f = c.frustum;
    read_number(*it, "gaussian_mu", p, f.gaussian_mu);
    read_number(*it, "gaussian_sigma", p, f.gaussian_sigma);
    read_number(*it, "beta_alpha", p, f.beta_alpha);
    read_number(*it, "beta_beta", p, f.beta_beta);
    if (const auto o = it->find("vertical_origin"); o != it->end()) {
      f.vertical_origin = as_enum(*o, child(p, "vertical_origin"), kOrigins);
    }
  }
  if (const auto it = j.find("fusion"); it != j.end()) {
    const std::string p = child(path, "fusion");
    check_keys(*it, p, {"saliency", "semantic", "frustum"});
    read_number(*it, "saliency", p, c.fusion.saliency);
    read_number(*it, "semantic", p, c.fusion.semantic);
    read_number(*it, "frustum", p, c.fusion.frustum);
  }
  auto& sf = c.social_force;
  bool max_speed_given = false;
  if (const auto it = j.find("social_force"); it != j.end()) {
    const std::string p = child(path, "social_force");
    check_keys(*it, p,
               {"desired_speed", "relaxation_time", "pedestrian_strength", "pedestrian_range", "wall_strength",
                "wall_range", "anisotropy", "fov_half_angle_deg", "step_lookahead", "body_radius", "max_speed"});
    read_number(*it, "desired_speed", p, sf.desired_speed);
    read_number(*it, "relaxation_time", p, sf.relaxation_time);
    read_number(*it, "pedestrian_strength", p, sf.pedestrian_strength);
    read_number(*it, "pedestrian_range", p, sf.pedestrian_range);
    read_number(*it, "wall_strength", p, sf.wall_strength);
    read_number(*it, "wall_range", p, sf.wall_range);
    read_number(*it, "anisotropy", p, sf.anisotropy);
    read_number(*it, "fov_half_angle_deg", p, sf.fov_half_angle_deg);
    read_number(*it, "step_lookahead", p, sf.step_lookahead);
    read_number(*it, "body_radius", p, sf.body_radius);
    max_speed_given = it->contains("max_speed");
    read_number(*it, "max_speed", p, sf.max_speed);
  }
  if (!max_speed_given) sf.max_speed = 1.3 * sf.desired_speed;
}

Scenario read_document(const json& doc) {
  check_keys(doc, "",
             {"floors", "portals", "signs", "base_points", "goal_points", "semantic_model", "task", "config"});
  Scenario s;
  Environment& env = s.environment;
  {
    const json& floors = as_array(require(doc, "floors", ""), "floors");
    for (std::size_t i = 0; i < floors.size(); ++i) env.floors.push_back(read_floor(floors[i], item("floors", i)));
  }
  if (const auto it = doc.find("portals"); it != doc.end()) {
    as_array(*it, "portals");
    for (std::size_t i = 0; i < it->size(); ++i) env.portals.push_back(read_portal((*it)[i], item("portals", i)));
  }
  if (const auto it = doc.find("signs"); it != doc.end()) {
    as_array(*it, "signs");
    for (std::size_t i = 0; i < it->size(); ++i) env.signs.push_back(read_sign((*it)[i], item("signs", i)));
  }
  {
    const json& base = as_array(require(doc, "base_points", ""), "base_points");
    for (std::size_t i = 0; i < base.size(); ++i) {
      env.base_points.push_back(read_named_point(base[i], item("base_points", i)));
    }
  }
  if (const auto it = doc.find("goal_points"); it != doc.end()) {
    as_array(*it, "goal_points");
    for (std::size_t i = 0; i < it->size(); ++i) {
      env.goal_points.push_back(read_named_point((*it)[i], item("goal_points", i)));
    }
  }
  if (const auto it = doc.find("semantic_model"); it != doc.end()) {
    env.semantic_model = read_semantic(*it, "semantic_model");
  }
  {
    const json& task = require(doc, "task", "");
    check_keys(task, "task", {"legs"});
    const json& legs = as_array(require(task, "legs", "task"), "task.legs");
    for (std::size_t i = 0; i < legs.size(); ++i) s.task.legs.push_back(read_leg(legs[i], item("task.legs", i)));
  }
  if (const auto it = doc.find("config"); it != doc.end()) {
    read_config(*it, "config", s.config);
  } else {
    s.config.social_force.max_speed = 1.3 * s.config.social_force.desired_speed;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Invariant checks

constexpr double kWallMountTolerance = 0.1;  // m, how far a wall-mounted sign may sit from the boundary

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_polygon(const Polygon& poly, const std::string& path, std::vector<Issue>& issues) {
  if (poly.size() < 3) {
    issues.push_back({path, "polygon needs at least 3 vertices"});
  } else if (!polygon_is_simple(poly)) {
    issues.push_back({path, "polygon is not simple"});
  }
}

bool near_boundary(const Floor& floor, const Vec2& p) {
  for (const auto& w : floor.walls()) {
    if (distance_to_segment(w, p) <= kWallMountTolerance) return true;
  }
  return false;
}

}  // namespace

std::vector<Issue> validate_scenario(const Scenario& scenario) {
  std::vector<Issue> issues;
  const Environment& env = scenario.environment;

  std::map<std::string, const Floor*> floors;
  if (env.floors.empty()) issues.push_back({"floors", "at least one floor is required"});
  for (std::size_t i = 0; i < env.floors.size(); ++i) {
    const Floor& f = env.floors[i];
    const std::string path = item("floors", i);
    if (f.id.empty()) issues.push_back({child(path, "id"), "empty id"});
    // Floor ids name output files (heatmap_<id>.pgm).
    const bool file_safe = std::all_of(f.id.begin(), f.id.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
    if (!file_safe) issues.push_back({child(path, "id"), "floor id may contain only letters, digits, '_' and '-'"});
    if (!floors.emplace(f.id, &f).second) issues.push_back({child(path, "id"), "duplicate floor id '" + f.id + "'"});
    check_polygon(f.outline, child(path, "outline"), issues);
    if (f.outline.size() >= 3 && signed_area(f.outline) <= 0.0) {
      issues.push_back({child(path, "outline"), "outline must be counterclockwise"});
    }
    const auto outline_edges = polygon_edges(f.outline);
    for (std::size_t k = 0; k < f.obstacles.size(); ++k) {
      const std::string op = item(child(path, "obstacles"), k);
      const Polygon& obstacle = f.obstacles[k];
      check_polygon(obstacle, op, issues);
      bool inside = true;
      for (const auto& v : obstacle) inside = inside && point_in_polygon(f.outline, v);
      for (const auto& e : polygon_edges(obstacle)) {
        for (const auto& o : outline_edges) inside = inside && !segments_intersect(e, o);
      }
      if (!inside) issues.push_back({op, "obstacle must lie strictly inside the outline"});
    }
  }
  const auto floor_of = [&](const std::string& id) -> const Floor* {
    const auto it = floors.find(id);
    return it == floors.end() ? nullptr : it->second;
  };
  const auto check_point = [&](const std::string& floor_id, const Vec2& p, const std::string& path,
                               const std::string& floor_path) {
    const Floor* f = floor_of(floor_id);
    if (!f) {
      issues.push_back({floor_path, "unknown floor '" + floor_id + "'"});
    } else if (!f->walkable(p)) {
      issues.push_back({path, "point is outside the walkable region of floor '" + floor_id + "'"});
    }
  };

  std::set<std::string> portal_ids;
  for (std::size_t i = 0; i < env.portals.size(); ++i) {
    const Portal& p = env.portals[i];
    const std::string path = item("portals", i);
    if (!portal_ids.insert(p.id).second) issues.push_back({child(path, "id"), "duplicate portal id '" + p.id + "'"});
    check_point(p.floor_a, p.point_a, child(path, "point_a"), child(path, "floor_a"));
    check_point(p.floor_b, p.point_b, child(path, "point_b"), child(path, "floor_b"));
    if (p.floor_a == p.floor_b) issues.push_back({path, "portal must connect two different floors"});
    if (!(p.traversal_time > 0.0)) issues.push_back({child(path, "traversal_time"), "must be positive"});
  }

  std::set<std::string> named;
  std::set<std::string> goal_ids;
  const auto check_named = [&](const std::vector<NamedPoint>& points, const std::string& list) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const NamedPoint& p = points[i];
      const std::string path = item(list, i);
      if (p.id.empty()) issues.push_back({child(path, "id"), "empty id"});
      if (!named.insert(p.id).second) issues.push_back({child(path, "id"), "duplicate point id '" + p.id + "'"});
      check_point(p.floor, p.position, child(path, "position"), child(path, "floor"));
    }
  };
  check_named(env.base_points, "base_points");
  check_named(env.goal_points, "goal_points");
  for (const auto& g : env.goal_points) goal_ids.insert(g.id);
  if (env.base_points.empty()) issues.push_back({"base_points", "at least one base point is required"});

  std::set<SignId> sign_ids;
  for (std::size_t i = 0; i < env.signs.size(); ++i) {
    const Sign& s = env.signs[i];
    const std::string path = item("signs", i);
    if (s.id == 0) issues.push_back({child(path, "id"), "sign id 0 is reserved for the background"});
    if (!sign_ids.insert(s.id).second) {
      issues.push_back({child(path, "id"), "duplicate sign id " + std::to_string(s.id)});
    }
    const Floor* f = floor_of(s.floor);
    const Vec2 foot = s.center.head<2>();
    if (!f) {
      issues.push_back({child(path, "floor"), "unknown floor '" + s.floor + "'"});
    } else if (!f->walkable(foot) && !near_boundary(*f, foot)) {
      issues.push_back({child(path, "center"), "sign " + std::to_string(s.id) +
                                                   " is neither in the walkable region nor on a wall"});
    }
    if (std::abs(s.normal.norm() - 1.0) > 1e-6) issues.push_back({child(path, "normal"), "normal must be a unit vector"});
    if (!(s.width > 0.0)) issues.push_back({child(path, "width"), "must be positive"});
    if (!(s.height > 0.0)) issues.push_back({child(path, "height"), "must be positive"});
    if (!(s.center.z() >= 0.0)) issues.push_back({child(path, "center"), "height above floor must be non-negative"});
    for (int k = 0; k < 3; ++k) {
      if (!in_unit(s.face_color[k])) issues.push_back({child(path, "face_color"), "components must be in [0, 1]"});
    }
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      const SignEntry& e = s.entries[k];
      const std::string ep = item(child(path, "entries"), k);
      if (e.label.empty()) issues.push_back({child(ep, "label"), "empty label"});
      if (e.action == SignEntry::Action::direct_to && !goal_ids.count(e.goal_point)) {
        issues.push_back({child(ep, "goal_point"), "sign " + std::to_string(s.id) +
                                                       " directs to unknown goal point '" + e.goal_point + "'"});
      }
    }
  }

  const SemanticModel& sm = env.semantic_model;
  for (std::size_t k = 0; k < sm.relevance.size(); ++k) {
    if (!in_unit(sm.relevance[k])) {
      issues.push_back({child("semantic_model.relevance", to_string(static_cast<ObjectClass>(k))),
                        "must be in [0, 1]"});
    }
  }
  if (!in_unit(sm.background_relevance)) {
    issues.push_back({"semantic_model.background_relevance", "must be in [0, 1]"});
  }

  const Task& task = scenario.task;
  if (task.legs.empty()) issues.push_back({"task.legs", "at least one leg is required"});
  for (std::size_t i = 0; i < task.legs.size(); ++i) {
    const Leg& leg = task.legs[i];
    const std::string path = item("task.legs", i);
    if (leg.start) {
      if (!named.count(*leg.start)) issues.push_back({child(path, "start"), "unknown point '" + *leg.start + "'"});
    } else if (i == 0) {
      issues.push_back({child(path, "start"), "the first leg needs a start point"});
    }
    if (leg.target_label.empty()) issues.push_back({child(path, "target_label"), "empty target label"});
    check_point(leg.target.floor, leg.target.point, child(path, "target.point"), child(path, "target.floor"));
    if (!(leg.arrival_radius > 0.0)) issues.push_back({child(path, "arrival_radius"), "must be positive"});
  }

  const SimulationConfig& c = scenario.config;
  if (!(c.dt > 0.0 && c.dt <= 0.1)) issues.push_back({"config.dt", "must be in (0, 0.1]"});
  if (!(c.perception_interval >= c.dt)) issues.push_back({"config.perception_interval", "must be at least dt"});
  if (!(c.leg_timeout > 0.0)) issues.push_back({"config.leg_timeout", "must be positive"});
  if (c.replications < 1) issues.push_back({"config.replications", "must be at least 1"});
  if (c.agents_per_replication < 1) issues.push_back({"config.agents_per_replication", "must be at least 1"});
  if (!(c.eye_height > 0.0)) issues.push_back({"config.eye_height", "must be positive"});
  if (!(c.waypoint_tolerance > 0.0)) issues.push_back({"config.waypoint_tolerance", "must be positive"});
  if (!(c.cell_size > 0.0)) issues.push_back({"config.cell_size", "must be positive"});
  if (!(c.spawn_spacing > 0.0)) issues.push_back({"config.spawn_spacing", "must be positive"});
  if (c.kappa && !(*c.kappa > 0.0)) issues.push_back({"config.kappa", "must be positive"});
  if (!c.camera.valid()) issues.push_back({"config.camera", "invalid camera settings"});
  if (!(c.frustum.gaussian_sigma > 0.0)) issues.push_back({"config.frustum.gaussian_sigma", "must be positive"});
  if (!(c.frustum.beta_alpha > 0.0 && c.frustum.beta_beta > 0.0)) {
    issues.push_back({"config.frustum", "beta parameters must be positive"});
  }
  const auto& w = c.fusion;
  if (!(w.saliency >= 0.0 && w.semantic >= 0.0 && w.frustum >= 0.0 && w.total() > 0.0)) {
    issues.push_back({"config.fusion", "weights must be non-negative with a positive sum"});
  }
  if (!c.social_force.valid()) issues.push_back({"config.social_force", "invalid social force parameters"});
  return issues;
}

Scenario load_scenario(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
  Scenario s = read_document(doc);
  if (auto issues = validate_scenario(s); !issues.empty()) throw ValidationError(std::move(issues));
  s.environment.build_index();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioIoError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ScenarioIoError("cannot read scenario file " + path.string());
  return load_scenario(buffer.str());
}

namespace {

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json polygon(const Polygon& p) {
  json out = json::array();
  for (const auto& v : p) out.push_back(vec(v));
  return out;
}

json named_point(const NamedPoint& p) {
  return {{"id", p.id}, {"floor", p.floor}, {"position", vec(p.position)}, {"heading_deg", p.heading_deg}};
}

}  // namespace

std::string write_scenario(const Scenario& scenario) {
  const Environment& env = scenario.environment;
  json doc;
  doc["floors"] = json::array();
  for (const auto& f : env.floors) {
    json obstacles = json::array();
    for (const auto& o : f.obstacles) obstacles.push_back(polygon(o));
    doc["floors"].push_back(
        {{"id", f.id}, {"outline", polygon(f.outline)}, {"obstacles", obstacles}, {"elevation", f.elevation}});
  }
  doc["portals"] = json::array();
  for (const auto& p : env.portals) {
    doc["portals"].push_back({{"id", p.id},
                              {"floor_a", p.floor_a},
                              {"floor_b", p.floor_b},
                              {"point_a", vec(p.point_a)},
                              {"point_b", vec(p.point_b)},
                              {"traversal_time", p.traversal_time},
                              {"kind", to_string(p.kind)}});
  }
  doc["signs"] = json::array();
  for (const auto& s : env.signs) {
    json entries = json::array();
    for (const auto& e : s.entries) {
      json entry{{"label", e.label},
                 {"action", e.action == SignEntry::Action::at_target ? "at_target" : "direct_to"}};
      if (e.action == SignEntry::Action::direct_to) entry["goal_point"] = e.goal_point;
      entries.push_back(entry);
    }
    doc["signs"].push_back({{"id", s.id},
                            {"floor", s.floor},
                            {"center", vec(s.center)},
                            {"normal", vec(s.normal)},
                            {"width", s.width},
                            {"height", s.height},
                            {"face_color", vec(s.face_color)},
                            {"object_class", to_string(s.object_class)},
                            {"entries", entries}});
  }
  doc["base_points"] = json::array();
  for (const auto& p : env.base_points) doc["base_points"].push_back(named_point(p));
  doc["goal_points"] = json::array();
  for (const auto& p : env.goal_points) doc["goal_points"].push_back(named_point(p));

  json relevance;
  for (std::size_t k = 0; k < env.semantic_model.relevance.size(); ++k) {
    relevance[to_string(static_cast<ObjectClass>(k))] = env.semantic_model.relevance[k];
  }
  doc["semantic_model"] = {{"relevance", relevance},
                           {"background_relevance", env.semantic_model.background_relevance}};

  json legs = json::array();
  for (const auto& leg : scenario.task.legs) {
    json l{{"target_label", leg.target_label},
           {"target", {{"floor", leg.target.floor}, {"point", vec(leg.target.point)}}},
           {"arrival_radius", leg.arrival_radius}};
    if (leg.start) l["start"] = *leg.start;
    legs.push_back(l);
  }
  doc["task"] = {{"legs", legs}};

  const SimulationConfig& c = scenario.config;
  const auto& cam = c.camera;
  const auto& fr = c.frustum;
  const auto& sf = c.social_force;
  json config{{"dt", c.dt},
              {"perception_interval", c.perception_interval},
              {"leg_timeout", c.leg_timeout},
              {"replications", c.replications},
              {"master_seed", c.master_seed},
              {"agents_per_replication", c.agents_per_replication},
              {"eye_height", c.eye_height},
              {"waypoint_tolerance", c.waypoint_tolerance},
              {"cell_size", c.cell_size},
              {"spawn_spacing", c.spawn_spacing},
              {"camera",
               {{"horizontal_fov_deg", cam.horizontal_fov_deg},
                {"raster_width", cam.raster_width},
                {"raster_height", cam.raster_height},
                {"max_view_distance", cam.max_view_distance},
                {"wall_gray", cam.wall_gray},
                {"floor_gray", cam.floor_gray},
                {"noise_amplitude", cam.noise_amplitude}}},
              {"frustum",
               {{"gaussian_mu", fr.gaussian_mu},
                {"gaussian_sigma", fr.gaussian_sigma},
                {"beta_alpha", fr.beta_alpha},
                {"beta_beta", fr.beta_beta},
                {"vertical_origin", fr.vertical_origin == FrustumParams::VerticalOrigin::top ? "top" : "bottom"}}},
              {"fusion", {{"saliency", c.fusion.saliency}, {"semantic", c.fusion.semantic}, {"frustum", c.fusion.frustum}}},
              {"social_force",
               {{"desired_speed", sf.desired_speed},
                {"relaxation_time", sf.relaxation_time},
                {"pedestrian_strength", sf.pedestrian_strength},
                {"pedestrian_range", sf.pedestrian_range},
                {"wall_strength", sf.wall_strength},
                {"wall_range", sf.wall_range},
                {"anisotropy", sf.anisotropy},
                {"fov_half_angle_deg", sf.fov_half_angle_deg},
                {"step_lookahead", sf.step_lookahead},
                {"body_radius", sf.body_radius},
                {"max_speed", sf.max_speed}}}};
  if (c.kappa) config["kappa"] = *c.kappa;
  doc["config"] = config;
  return doc.dump(2) + "\n";
}

}  // namespace wayfind
