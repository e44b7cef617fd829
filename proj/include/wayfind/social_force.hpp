#pragma once

#include "wayfind/geometry.hpp"

#include <span>

namespace wayfind {

/// Helbing-Molnar style parameters. The defaults follow the social force literature.
struct SocialForceParams {
  double desired_speed = 1.34;      // m/s
  double relaxation_time = 0.5;     // s
  double pedestrian_strength = 2.1; // m^2/s^2
  double pedestrian_range = 0.3;    // m
  double wall_strength = 10.0;      // m^2/s^2
  double wall_range = 0.2;          // m
  double anisotropy = 0.5;          // weight for forces from outside the field of view
  double fov_half_angle_deg = 100.0;
  double step_lookahead = 2.0;      // s
  double body_radius = 0.25;        // m
  double max_speed = 1.3 * 1.34;    // m/s

  bool valid() const;
};

struct Body {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

/// Relaxation toward desired_speed along the unit direction to the waypoint.
Vec2 driving_force(const Body& self, const Vec2& waypoint, const SocialForceParams& params);

/// Repulsion from one neighbor via the elliptical potential V0 exp(-b / sigma).
/// `heading` is the agent's desired direction, used for the field-of-view weighting.
Vec2 pedestrian_repulsion(const Body& self, const Vec2& heading, const Body& other, const SocialForceParams& params);

/// Repulsion from the closest point of a wall segment via U0 exp(-w / R).
Vec2 wall_repulsion(const Body& self, const Vec2& heading, const Segment& wall, const SocialForceParams& params);

/// Total acceleration acting on `self`.
Vec2 social_acceleration(const Body& self, std::span<const Body> neighbors, std::span<const Segment> walls,
                         const Vec2& waypoint, const SocialForceParams& params);

/// Pushes a position out of any wall closer than the body radius and removes the velocity
/// component pointing into that wall.
void resolve_wall_contacts(Body& body, std::span<const Segment> walls, double radius);

/// One explicit Euler step: velocity, speed clamp, position, then wall contact resolution.
/// `neighbors` must not contain `self`.
Body social_force_step(const Body& self, std::span<const Body> neighbors, std::span<const Segment> walls,
                       const Vec2& waypoint, const SocialForceParams& params, double dt);

}  // namespace wayfind
