#include "wayfind/perception.hpp"

#include "wayfind/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wayfind {

double CameraConfig::focal_px() const {
  const double half = 0.5 * horizontal_fov_deg * std::numbers::pi / 180.0;
  return 0.5 * raster_width / std::tan(half);
}

bool CameraConfig::valid() const {
  return horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0 && raster_width >= 16 &&
         raster_height >= 16 && max_view_distance > 0.0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Signs this close in front of a wall or floor surface win the depth test.
constexpr double kDecalTolerance = 0.02;

struct SignColumn {
  const Sign* sign;
  double t;  // ray parameter of the sign plane for this column
};

}  // namespace

std::optional<Vec2> project_point(const CameraPose& pose, const CameraConfig& config, const Vec3& world) {
  const Vec3 rel = world - pose.eye();
  const double forward = rel.head<2>().dot(pose.heading);
  if (forward <= 0.0) return std::nullopt;
  const double f = config.focal_px();
  const double side = rel.head<2>().dot(pose.right());
  return Vec2{0.5 * config.raster_width + f * side / forward, 0.5 * config.raster_height - f * rel.z() / forward};
}

RenderedView render_view(const Environment& env, const CameraPose& pose, const CameraConfig& config) {
  const int width = config.raster_width;
  const int height = config.raster_height;
  RenderedView view{ViewRaster(width, height, config.wall_gray),
                    SignMask{Raster<SignId>::Zero(height, width), Raster<double>::Constant(height, width, kInf)}};

  const Floor* floor = env.find_floor(pose.floor);
  if (floor == nullptr || !floor->walkable(pose.position)) return view;

  const double f = config.focal_px();
  const Vec2 right = pose.right();
  const auto& walls = env.walls(pose.floor);

  std::vector<const Sign*> signs;
  for (SignId id : candidate_signs(env, pose, config.max_view_distance)) signs.push_back(&env.sign(id));

  std::vector<SignColumn> hits;
  for (int x = 0; x < width; ++x) {
    const double u = (x + 0.5) - 0.5 * width;
    const Vec2 dir_h = pose.heading + (u / f) * right;

    double t_wall = kInf;
    for (const auto& w : walls) {
      if (auto t = ray_segment_hit<double>(pose.position, dir_h, w); t && *t < t_wall) t_wall = *t;
    }

    // The sign plane is vertical, so its ray parameter depends on the column only.
    hits.clear();
    for (const Sign* s : signs) {
      const double denom = dir_h.dot(s->normal);
      if (denom >= 0.0) continue;
      const double t = (s->center.head<2>() - pose.position).dot(s->normal) / denom;
      if (t <= 0.0) continue;
      const double lateral = (pose.position + t * dir_h - s->center.head<2>()).dot(s->tangent());
      if (std::abs(lateral) > 0.5 * s->width) continue;
      hits.push_back({s, t});
    }

    for (int y = 0; y < height; ++y) {
      const double v = (y + 0.5) - 0.5 * height;
      const double dz = -v / f;
      const double dir_norm = std::sqrt(dir_h.squaredNorm() + dz * dz);
      const double t_floor = dz < 0.0 ? pose.eye_height / -dz : kInf;
      const double t_surface = std::min(t_wall, t_floor);

      const Sign* best = nullptr;
      double best_t = kInf;
      for (const auto& h : hits) {
        const double z = pose.eye_height + h.t * dz;
        if (std::abs(z - h.sign->center.z()) > 0.5 * h.sign->height) continue;
        if (h.t * dir_norm > config.max_view_distance) continue;
        if (h.t > t_surface + kDecalTolerance / dir_norm) continue;
        if (h.t < best_t || (h.t == best_t && best != nullptr && h.sign->id < best->id)) {
          best = h.sign;
          best_t = h.t;
        }
      }

      if (best != nullptr) {
        view.raster.set(x, y, best->face_color);
        view.mask.ids(y, x) = best->id;
        view.mask.depth(y, x) = best_t * dir_norm;
        continue;
      }
      double gray = t_floor < t_wall ? config.floor_gray : config.wall_gray;
      if (config.noise_amplitude > 0.0) {
        const double n = 2.0 * unit_double(hash_keys({static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y)})) - 1.0;
        gray = std::clamp(gray + config.noise_amplitude * n, 0.0, 1.0);
      }
      view.raster.set(x, y, Vec3::Constant(gray));
      view.mask.depth(y, x) = std::isfinite(t_surface) ? t_surface * dir_norm : kInf;
    }
  }
  return view;
}

long projected_pixel_count(const Environment& env, const CameraPose& pose, const CameraConfig& config,
                           SignId sign_id) {
  if (env.find_sign(sign_id) == nullptr) {
    throw std::out_of_range("unknown sign id " + std::to_string(sign_id));
  }
  const auto view = render_view(env, pose, config);
  return (view.mask.ids == sign_id).count();
}

}  // namespace wayfind
