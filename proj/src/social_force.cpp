#include "wayfind/social_force.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wayfind {

bool SocialForceParams::valid() const {
  return desired_speed > 0 && relaxation_time > 0 && pedestrian_strength > 0 && pedestrian_range > 0 &&
         wall_strength > 0 && wall_range > 0 && anisotropy > 0 && anisotropy <= 1 && fov_half_angle_deg > 0 &&
         step_lookahead > 0 && body_radius > 0 && max_speed > 0;
}

namespace {

constexpr double kTiny = 1e-12;

Vec2 unit_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n > kTiny ? Vec2(v / n) : Vec2::Zero();
}

// Full weight for sources within the half-angle ahead, `anisotropy` otherwise.
double view_weight(const Vec2& heading, const Vec2& toward_source, const SocialForceParams& params) {
  if (heading.squaredNorm() < kTiny) return 1.0;
  const double cos_phi = std::cos(params.fov_half_angle_deg * std::numbers::pi / 180.0);
  return heading.dot(unit_or_zero(toward_source)) >= cos_phi ? 1.0 : params.anisotropy;
}

}  // namespace

Vec2 driving_force(const Body& self, const Vec2& waypoint, const SocialForceParams& params) {
  const Vec2 e = unit_or_zero(waypoint - self.position);
  return (params.desired_speed * e - self.velocity) / params.relaxation_time;
}

Vec2 pedestrian_repulsion(const Body& self, const Vec2& heading, const Body& other, const SocialForceParams& params) {
  const Vec2 d = self.position - other.position;
  const double dn = d.norm();
  if (dn < kTiny) return Vec2::Zero();
  const double speed = other.velocity.norm();
  const Vec2 step = params.step_lookahead * other.velocity;  // v_beta * dt_step * e_beta
  const Vec2 y = d - step;
  const double yn = y.norm();
  const double s = speed * params.step_lookahead;
  const double sum = dn + yn;
  const double b = 0.5 * std::sqrt(std::max(sum * sum - s * s, 0.0));
  if (b < kTiny) return Vec2::Zero();
  // -grad V(b(d)) with dV/db = -V0/sigma exp(-b/sigma), db/dd = sum (d/|d| + y/|y|) / (4b).
  Vec2 grad_b = d / dn;
  if (yn > kTiny) grad_b += y / yn;
  grad_b *= sum / (4.0 * b);
  const double magnitude = params.pedestrian_strength / params.pedestrian_range * std::exp(-b / params.pedestrian_range);
  return view_weight(heading, -d, params) * magnitude * grad_b;
}

Vec2 wall_repulsion(const Body& self, const Vec2& heading, const Segment& wall, const SocialForceParams& params) {
  const Vec2 closest = closest_point_on_segment(wall, self.position);
  const Vec2 away = self.position - closest;
  const double w = away.norm();
  if (w < kTiny) return Vec2::Zero();
  const double magnitude = params.wall_strength / params.wall_range * std::exp(-w / params.wall_range);
  return view_weight(heading, -away, params) * magnitude * (away / w);
}

Vec2 social_acceleration(const Body& self, std::span<const Body> neighbors, std::span<const Segment> walls,
                         const Vec2& waypoint, const SocialForceParams& params) {
  const Vec2 heading = unit_or_zero(waypoint - self.position);
  Vec2 acc = driving_force(self, waypoint, params);
  for (const auto& other : neighbors) acc += pedestrian_repulsion(self, heading, other, params);
  for (const auto& wall : walls) acc += wall_repulsion(self, heading, wall, params);
  return acc;
}

void resolve_wall_contacts(Body& body, std::span<const Segment> walls, double radius) {
  constexpr int kIterations = 8;
  constexpr double kSkin = 1e-9;
  for (int it = 0; it < kIterations; ++it) {
    bool moved = false;
    for (const auto& wall : walls) {
      const Vec2 closest = closest_point_on_segment(wall, body.position);
      const Vec2 away = body.position - closest;
      const double dist = away.norm();
      if (dist >= radius) continue;
      Vec2 normal = dist > kTiny ? Vec2(away / dist) : unit_or_zero(-body.velocity);
      if (normal.squaredNorm() < kTiny) normal = perp<double>(unit_or_zero(wall.b - wall.a));
      body.position = closest + (radius + kSkin) * normal;
      const double into = body.velocity.dot(normal);
      if (into < 0.0) body.velocity -= into * normal;
      moved = true;
    }
    if (!moved) break;
  }
}

Body social_force_step(const Body& self, std::span<const Body> neighbors, std::span<const Segment> walls,
                       const Vec2& waypoint, const SocialForceParams& params, double dt) {
  if (!(dt > 0.0 && dt <= 0.1)) throw std::invalid_argument("social_force_step: dt must be in (0, 0.1]");
  Body next = self;
  next.velocity += dt * social_acceleration(self, neighbors, walls, waypoint, params);
  const double speed = next.velocity.norm();
  if (speed > params.max_speed) next.velocity *= params.max_speed / speed;
  next.position += dt * next.velocity;
  resolve_wall_contacts(next, walls, params.body_radius);
  return next;
}

}  // namespace wayfind
