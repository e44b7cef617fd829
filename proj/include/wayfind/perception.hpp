#pragma once

#include "wayfind/camera.hpp"
#include "wayfind/environment.hpp"
#include "wayfind/raster.hpp"

#include <optional>
#include <utility>

namespace wayfind {

struct RenderedView {
  ViewRaster raster;
  SignMask mask;
};

/// Synthetic first-person view of one floor.
///
/// Every pixel casts a pinhole ray. Walls are the outline and obstacle edges extruded
/// without a ceiling; the floor is the z = 0 plane. Candidate signs are intersected as
/// one-sided rectangles and the nearest hit wins. A sign within a couple of centimeters in
/// front of a wall surface is drawn over it, so wall-mounted signs do not z-fight.
RenderedView render_view(const Environment& env, const CameraPose& pose, const CameraConfig& config);

/// Continuous pixel coordinates (x right, y down, pixel centers at +0.5) of a world point,
/// or nothing when it is not in front of the camera.
std::optional<Vec2> project_point(const CameraPose& pose, const CameraConfig& config, const Vec3& world);

/// Number of mask pixels showing `sign_id`. Throws std::out_of_range for unknown ids.
long projected_pixel_count(const Environment& env, const CameraPose& pose, const CameraConfig& config,
                           SignId sign_id);

}  // namespace wayfind
