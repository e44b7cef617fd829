#pragma once

#include "wayfind/geometry.hpp"

#include <string>

namespace wayfind {

/// First-person camera: level pitch, looking along the walking direction.
struct CameraPose {
  std::string floor;
  Vec2 position = Vec2::Zero();
  double eye_height = 1.6;
  Vec2 heading = Vec2::UnitX();

  Vec3 eye() const { return {position.x(), position.y(), eye_height}; }
  /// Camera right axis in the floor plane.
  Vec2 right() const { return {heading.y(), -heading.x()}; }
};

struct CameraConfig {
  double horizontal_fov_deg = 90.0;
  int raster_width = 160;
  int raster_height = 120;
  double max_view_distance = 60.0;
  double wall_gray = 0.5;
  double floor_gray = 0.35;
  double noise_amplitude = 0.0;

  /// Focal length in pixels.
  double focal_px() const;
  bool valid() const;
};

}  // namespace wayfind
