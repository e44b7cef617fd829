#pragma once

#include "wayfind/attention.hpp"
#include "wayfind/camera.hpp"
#include "wayfind/social_force.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace wayfind {

struct SimulationConfig {
  double dt = 0.05;                   // s
  double perception_interval = 0.5;   // s
  double leg_timeout = 600.0;         // s
  int replications = 1;
  std::uint64_t master_seed = 0;
  int agents_per_replication = 20;
  double eye_height = 1.6;            // m
  double waypoint_tolerance = 0.5;    // m
  double cell_size = 0.5;             // m
  double spawn_spacing = 0.8;         // m between agents placed around a spawn point
  CameraConfig camera;
  FrustumParams frustum;
  FusionWeights fusion;
  std::optional<double> kappa;        // default: 1% of the raster area
  SocialForceParams social_force;

  double effective_kappa() const { return kappa.value_or(default_kappa(camera)); }
  /// Number of dt ticks per perception tick (at least 1).
  int perception_every() const;
};

}  // namespace wayfind
