#pragma once

#include "wayfind/environment.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>

namespace wayfind {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Regular occupancy grid over a floor's bounding box.
class NavGrid {
 public:
  NavGrid() = default;
  NavGrid(std::string floor, double cell_size, Vec2 origin, int width, int height);

  const std::string& floor() const { return floor_; }
  double cell_size() const { return cell_size_; }
  const Vec2& origin() const { return origin_; }
  int width() const { return static_cast<int>(blocked_.rows()); }
  int height() const { return static_cast<int>(blocked_.cols()); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width() && c.y < height(); }
  /// Out-of-bounds cells count as blocked.
  bool blocked(Cell c) const { return !in_bounds(c) || blocked_(c.x, c.y) != 0; }
  void set_blocked(Cell c, bool value) { blocked_(c.x, c.y) = value ? 1 : 0; }
  long blocked_count() const { return (blocked_ != 0).count(); }

  Vec2 center(Cell c) const { return origin_ + cell_size_ * Vec2(c.x + 0.5, c.y + 0.5); }
  Cell cell_of(const Vec2& p) const;
  /// Grid coordinates: cell units relative to the origin.
  Vec2 to_grid(const Vec2& p) const { return (p - origin_) / cell_size_; }
  int index(Cell c) const { return c.y * width() + c.x; }
  Cell cell_at(int index) const { return {index % width(), index / width()}; }

 private:
  std::string floor_;
  double cell_size_ = 0.5;
  Vec2 origin_ = Vec2::Zero();
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> blocked_;  // (x, y)
};

/// A cell is blocked iff its open square overlaps an obstacle or leaves the floor outline.
/// Throws std::invalid_argument for a non-positive cell size or a degenerate outline.
NavGrid build_nav_grid(const Floor& floor, double cell_size);

/// Supercover traversal of the segment between two points. False when any traversed cell is
/// blocked, or when the segment passes exactly through a grid vertex whose two side cells are
/// both blocked.
bool grid_line_of_sight(const NavGrid& grid, const Vec2& a, const Vec2& b);

/// Exact visibility through the free space (the grid rectangle minus the closed blocked squares).
/// The segment may touch a blocked square's boundary but never enter its interior, run along an
/// edge with blocked squares on both sides, or pass through a vertex shared only diagonally by two
/// blocked squares. Less conservative than the supercover test, which it always accepts.
bool free_line_of_sight(const NavGrid& grid, const Vec2& a, const Vec2& b);

/// Same test between cell centers.
bool grid_line_of_sight(const NavGrid& grid, Cell a, Cell b);

/// Closest unblocked cell (by center distance) whose center lies within `max_distance` of `p`.
std::optional<Cell> nearest_unblocked(const NavGrid& grid, const Vec2& p, double max_distance);

}  // namespace wayfind
