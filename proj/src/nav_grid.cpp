#include "wayfind/nav_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wayfind {

NavGrid::NavGrid(std::string floor, double cell_size, Vec2 origin, int width, int height)
    : floor_(std::move(floor)),
      cell_size_(cell_size),
      origin_(std::move(origin)),
      blocked_(decltype(blocked_)::Zero(width, height)) {}

Cell NavGrid::cell_of(const Vec2& p) const {
  const Vec2 g = to_grid(p);
  return {static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y()))};
}

NavGrid build_nav_grid(const Floor& floor, double cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (!polygon_is_simple(floor.outline)) {
    throw std::invalid_argument("floor '" + floor.id + "' has a degenerate outline");
  }
  const Box2 box = bounding_box(floor.outline);
  const Vec2 extent = box.max - box.min;
  const int width = std::max(1, static_cast<int>(std::ceil(extent.x() / cell_size - 1e-9)));
  const int height = std::max(1, static_cast<int>(std::ceil(extent.y() / cell_size - 1e-9)));
  NavGrid grid(floor.id, cell_size, box.min, width, height);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Box2 cell{box.min + cell_size * Vec2(x, y), box.min + cell_size * Vec2(x + 1, y + 1)};
      bool blocked = !box_inside_polygon(floor.outline, cell);
      for (std::size_t i = 0; !blocked && i < floor.obstacles.size(); ++i) {
        blocked = polygon_overlaps_open_box(floor.obstacles[i], cell);
      }
      grid.set_blocked({x, y}, blocked);
    }
  }
  return grid;
}

bool grid_line_of_sight(const NavGrid& grid, const Vec2& a, const Vec2& b) {
  constexpr double kEps = 1e-9;
  const Vec2 ga = grid.to_grid(a);
  const Vec2 gb = grid.to_grid(b);
  Cell c{static_cast<int>(std::floor(ga.x())), static_cast<int>(std::floor(ga.y()))};
  if (grid.blocked(c)) return false;

  const Vec2 d = gb - ga;
  const int step_x = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int step_y = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double t_max_x = step_x == 0 ? kInf : ((step_x > 0 ? c.x + 1 : c.x) - ga.x()) / d.x();
  double t_max_y = step_y == 0 ? kInf : ((step_y > 0 ? c.y + 1 : c.y) - ga.y()) / d.y();
  const double t_delta_x = step_x == 0 ? kInf : 1.0 / std::abs(d.x());
  const double t_delta_y = step_y == 0 ? kInf : 1.0 / std::abs(d.y());

  while (std::min(t_max_x, t_max_y) < 1.0 - kEps) {
    if (std::abs(t_max_x - t_max_y) <= kEps) {
      // Through a vertex: squeezing between two diagonal blocked cells is not allowed.
      if (grid.blocked({c.x + step_x, c.y}) && grid.blocked({c.x, c.y + step_y})) return false;
      c.x += step_x;
      c.y += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      c.x += step_x;
      t_max_x += t_delta_x;
    } else {
      c.y += step_y;
      t_max_y += t_delta_y;
    }
    if (grid.blocked(c)) return false;
  }
  return true;
}

bool free_line_of_sight(const NavGrid& grid, const Vec2& a, const Vec2& b) {
  constexpr double kEps = 1e-9;
  const Vec2 ga = grid.to_grid(a);
  const Vec2 gb = grid.to_grid(b);
  const Vec2 d = gb - ga;
  if (d.norm() <= kEps) {
    // A single point: free when any closed free square contains it.
    for (int y = static_cast<int>(std::floor(ga.y() - kEps)); y <= static_cast<int>(std::floor(ga.y() + kEps)); ++y) {
      for (int x = static_cast<int>(std::floor(ga.x() - kEps)); x <= static_cast<int>(std::floor(ga.x() + kEps)); ++x) {
        if (!grid.blocked({x, y})) return true;
      }
    }
    return false;
  }
  const int x_lo = static_cast<int>(std::floor(std::min(ga.x(), gb.x()))) - 1;
  const int x_hi = static_cast<int>(std::floor(std::max(ga.x(), gb.x()))) + 1;
  const int y_lo = static_cast<int>(std::floor(std::min(ga.y(), gb.y()))) - 1;
  const int y_hi = static_cast<int>(std::floor(std::max(ga.y(), gb.y()))) + 1;
  auto pinch = [&](int vx, int vy) {
    const bool sw = grid.blocked({vx - 1, vy - 1}), se = grid.blocked({vx, vy - 1});
    const bool nw = grid.blocked({vx - 1, vy}), ne = grid.blocked({vx, vy});
    return (sw && ne && !se && !nw) || (se && nw && !sw && !ne);
  };

  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      if (!grid.blocked({x, y})) continue;
      // Liang-Barsky clip of the segment against the closed square [x, x+1] x [y, y+1].
      double t0 = 0.0, t1 = 1.0;
      bool misses = false;
      for (int axis = 0; axis < 2 && !misses; ++axis) {
        const double lo = axis == 0 ? x : y;
        const double p0 = ga[axis];
        if (std::abs(d[axis]) < 1e-15) {
          misses = p0 < lo - kEps || p0 > lo + 1 + kEps;
          continue;
        }
        double ta = (lo - p0) / d[axis], tb = (lo + 1 - p0) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        misses = t0 > t1;
      }
      if (misses) continue;
      if ((t1 - t0) * d.norm() > kEps) {
        const Vec2 m = ga + 0.5 * (t0 + t1) * d;
        const double fx = m.x() - x, fy = m.y() - y;
        if (fx > kEps && fx < 1 - kEps && fy > kEps && fy < 1 - kEps) return false;
        // Running along an edge: the square across it must be free.
        Cell across{x, y};
        if (fx <= kEps) across.x -= 1;
        else if (fx >= 1 - kEps) across.x += 1;
        else if (fy <= kEps) across.y -= 1;
        else across.y += 1;
        if (grid.blocked(across)) return false;
      }
      for (double t : {t0, t1}) {
        if (t <= kEps || t >= 1 - kEps) continue;
        const Vec2 p = ga + t * d;
        const Vec2 v = p.array().round().matrix();
        if ((p - v).norm() < kEps && pinch(static_cast<int>(v.x()), static_cast<int>(v.y()))) return false;
      }
    }
  }
  return true;
}

bool grid_line_of_sight(const NavGrid& grid, Cell a, Cell b) {
  return grid_line_of_sight(grid, grid.center(a), grid.center(b));
}

std::optional<Cell> nearest_unblocked(const NavGrid& grid, const Vec2& p, double max_distance) {
  const Cell c = grid.cell_of(p);
  if (!grid.blocked(c)) return c;
  const int reach = static_cast<int>(std::ceil(max_distance / grid.cell_size())) + 1;
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const Cell n{c.x + dx, c.y + dy};
      if (grid.blocked(n)) continue;
      const double dist = (grid.center(n) - p).norm();
      if (dist <= max_distance && dist < best_d) {
        best_d = dist;
        best = n;
      }
    }
  }
  return best;
}

}  // namespace wayfind
