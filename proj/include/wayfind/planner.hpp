#pragma once

#include "wayfind/environment.hpp"
#include "wayfind/nav_grid.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace wayfind {

struct Waypoint {
  std::string floor;
  Vec2 point = Vec2::Zero();
  std::string portal;  // non-empty: reached by traversing this portal from the previous waypoint
};

struct Path {
  std::vector<Waypoint> waypoints;
  /// Walking distance plus traversal_time * desired_speed for each portal used.
  double total_length = 0.0;
  /// Portal ids in traversal order.
  std::vector<std::string> portals;
};

enum class PlanStatus { ok, unreachable, start_off_grid, goal_off_grid };

struct PlanResult {
  PlanStatus status = PlanStatus::unreachable;
  Path path;

  bool ok() const { return status == PlanStatus::ok; }
};

std::string to_string(PlanStatus s);

/// Theta* on one grid between exact points that already sit in unblocked cells.
/// Expands 8-connected neighbors, shortcuts through the grandparent whenever it has line of
/// sight, and breaks f ties toward larger g. The result is then pulled taut around obstacle
/// corners near it using exact free-space visibility, which can only shorten it.
std::optional<Path> theta_star(const NavGrid& grid, const Vec2& start, const Vec2& goal);

struct PlannerOptions {
  double desired_speed = 1.34;  // converts portal traversal time to length
  double snap_distance = 2.0;
};

/// Multi-floor planner: Theta* on each floor's grid, stitched through portals with Dijkstra.
class Planner {
 public:
  Planner(const Environment& env, double cell_size, PlannerOptions options = {});

  PlanResult plan(const Location& start, const Location& goal) const;

  /// Memoized path length between the cells containing two points; infinity if unreachable.
  double path_length(const Location& start, const Location& goal) const;

  const NavGrid& grid(const std::string& floor) const;
  const std::map<std::string, NavGrid>& grids() const { return grids_; }

 private:
  const Environment& env_;
  std::map<std::string, NavGrid> grids_;
  PlannerOptions options_;
  mutable std::map<std::tuple<std::string, int, std::string, int>, double> length_cache_;
};

/// Free-function form over prebuilt grids.
PlanResult plan_path(const std::map<std::string, NavGrid>& grids, const std::vector<Portal>& portals,
                     const Location& start, const Location& goal, const PlannerOptions& options = {});

}  // namespace wayfind
