#include "wayfind/planner.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace wayfind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OpenEntry {
  double f;
  double g;
  int index;
};

// Min-heap on f; equal f prefers the larger g, then the lower index.
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.index > b.index;
  }
};

// Shortest-path bends lie on convex obstacle corners: grid vertices with exactly one blocked
// square among the four around them. Collects those within `reach` grid units of the polyline.
std::vector<Vec2> corners_near(const NavGrid& grid, const std::vector<Vec2>& polyline, double reach) {
  Eigen::AlignedBox2d box;
  for (const Vec2& p : polyline) box.extend(p);
  const int x_lo = std::max(0, static_cast<int>(std::floor(box.min().x() - reach)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(box.min().y() - reach)));
  const int x_hi = std::min(grid.width(), static_cast<int>(std::ceil(box.max().x() + reach)));
  const int y_hi = std::min(grid.height(), static_cast<int>(std::ceil(box.max().y() + reach)));
  std::vector<Vec2> out;
  for (int vy = y_lo; vy <= y_hi; ++vy) {
    for (int vx = x_lo; vx <= x_hi; ++vx) {
      const int around = grid.blocked({vx - 1, vy - 1}) + grid.blocked({vx, vy - 1}) + grid.blocked({vx - 1, vy}) +
                         grid.blocked({vx, vy});
      if (around != 1) continue;
      const Vec2 v(vx, vy);
      for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec2 ab = polyline[i + 1] - polyline[i];
        const double t = std::clamp((v - polyline[i]).dot(ab) / std::max(ab.squaredNorm(), 1e-30), 0.0, 1.0);
        if ((polyline[i] + t * ab - v).norm() <= reach) {
          out.push_back(v);
          break;
        }
      }
    }
  }
  return out;
}

// Pulls a Theta* path taut: Dijkstra over its own waypoints plus nearby obstacle corners, with
// exact free-space visibility. Every Theta* segment is itself visible, so this never lengthens.
void tighten(const NavGrid& grid, Path& path) {
  if (path.waypoints.size() < 3) return;
  std::vector<Vec2> polyline;
  for (const Waypoint& w : path.waypoints) polyline.push_back(grid.to_grid(w.point));
  std::vector<Vec2> nodes = polyline;
  const std::vector<Vec2> corners = corners_near(grid, polyline, 2.0);
  nodes.insert(nodes.end(), corners.begin(), corners.end());

  const std::size_t n = nodes.size();
  const std::size_t goal = polyline.size() - 1;
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> done(n, 0);
  dist[0] = 0.0;
  while (true) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && std::isfinite(dist[i]) && (u == n || dist[i] < dist[u])) u = i;
    }
    if (u == n || u == goal) break;
    done[u] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double len = (nodes[v] - nodes[u]).norm();
      if (dist[u] + len >= dist[v] - 1e-12) continue;
      if (!free_line_of_sight(grid, grid.origin() + grid.cell_size() * nodes[u],
                              grid.origin() + grid.cell_size() * nodes[v])) {
        continue;
      }
      dist[v] = dist[u] + len;
      parent[v] = u;
    }
  }
  if (parent[goal] == n) return;
  const double length = dist[goal] * grid.cell_size();
  if (length >= path.total_length) return;

  std::vector<std::size_t> chain;
  for (std::size_t i = goal; i != 0; i = parent[i]) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  std::vector<Waypoint> tight{path.waypoints.front()};
  for (std::size_t i : chain) {
    tight.push_back({grid.floor(), i < polyline.size() ? path.waypoints[i].point
                                                       : Vec2(grid.origin() + grid.cell_size() * nodes[i]),
                     {}});
  }
  path.waypoints = std::move(tight);
  path.total_length = length;
}

}  // namespace

std::string to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::ok: return "ok";
    case PlanStatus::unreachable: return "unreachable";
    case PlanStatus::start_off_grid: return "start_off_grid";
    case PlanStatus::goal_off_grid: return "goal_off_grid";
  }
  return "unreachable";
}

std::optional<Path> theta_star(const NavGrid& grid, const Vec2& start, const Vec2& goal) {
  const Cell start_cell = grid.cell_of(start);
  const Cell goal_cell = grid.cell_of(goal);
  if (grid.blocked(start_cell) || grid.blocked(goal_cell)) return std::nullopt;

  Path path;
  if (start == goal) return path;
  if (start_cell == goal_cell) {
    path.waypoints = {{grid.floor(), start, {}}, {grid.floor(), goal, {}}};
    path.total_length = (goal - start).norm();
    return path;
  }

  const int n = grid.width() * grid.height();
  const int start_index = grid.index(start_cell);
  const int goal_index = grid.index(goal_cell);
  auto position = [&](int i) -> Vec2 {
    if (i == start_index) return start;
    if (i == goal_index) return goal;
    return grid.center(grid.cell_at(i));
  };

  std::vector<double> g(static_cast<std::size_t>(n), kInf);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<char> closed(static_cast<std::size_t>(n), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;

  g[start_index] = 0.0;
  parent[start_index] = start_index;
  open.push({(goal - start).norm(), 0.0, start_index});

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const int s = top.index;
    if (closed[s] || top.g != g[s]) continue;
    if (s == goal_index) break;
    closed[s] = 1;
    const Cell cs = grid.cell_at(s);
    const Vec2 ps = position(s);
    for (int k = 0; k < 8; ++k) {
      const Cell cn{cs.x + kDx[k], cs.y + kDy[k]};
      if (grid.blocked(cn)) continue;
      const int sn = grid.index(cn);
      if (closed[sn]) continue;
      const Vec2 pn = position(sn);
      if (!grid_line_of_sight(grid, ps, pn)) continue;

      const int ps_parent = parent[s];
      int new_parent = s;
      double new_g = g[s] + (pn - ps).norm();
      if (ps_parent != s) {
        const Vec2 pp = position(ps_parent);
        if (grid_line_of_sight(grid, pp, pn)) {
          new_parent = ps_parent;
          new_g = g[ps_parent] + (pn - pp).norm();
        }
      }
      if (new_g < g[sn]) {
        g[sn] = new_g;
        parent[sn] = new_parent;
        open.push({new_g + (goal - pn).norm(), new_g, sn});
      }
    }
  }

  if (parent[goal_index] < 0) return std::nullopt;
  std::vector<int> chain;
  for (int i = goal_index; i != start_index; i = parent[i]) chain.push_back(i);
  chain.push_back(start_index);
  std::reverse(chain.begin(), chain.end());
  for (int i : chain) path.waypoints.push_back({grid.floor(), position(i), {}});
  path.total_length = g[goal_index];
  tighten(grid, path);
  return path;
}

namespace {

struct Node {
  std::string floor;
  Vec2 position;
  int portal = -1;  // index into portals, -1 for start/goal
  int partner = -1;  // the other end of the portal
};

// Snaps a point into an unblocked cell; returns the planning position.
std::optional<Vec2> snap(const NavGrid& grid, const Vec2& p, double max_distance) {
  if (!grid.blocked(grid.cell_of(p))) return p;
  const auto cell = nearest_unblocked(grid, p, max_distance);
  if (!cell) return std::nullopt;
  return grid.center(*cell);
}

}  // namespace

PlanResult plan_path(const std::map<std::string, NavGrid>& grids, const std::vector<Portal>& portals,
                     const Location& start, const Location& goal, const PlannerOptions& options) {
  PlanResult result;
  auto grid_of = [&](const std::string& floor) -> const NavGrid* {
    auto it = grids.find(floor);
    return it == grids.end() ? nullptr : &it->second;
  };

  if (start.floor == goal.floor && start.point == goal.point) {
    result.status = PlanStatus::ok;
    return result;
  }

  const NavGrid* start_grid = grid_of(start.floor);
  const NavGrid* goal_grid = grid_of(goal.floor);
  const auto start_pos = start_grid ? snap(*start_grid, start.point, options.snap_distance) : std::nullopt;
  if (!start_pos) {
    result.status = PlanStatus::start_off_grid;
    return result;
  }
  const auto goal_pos = goal_grid ? snap(*goal_grid, goal.point, options.snap_distance) : std::nullopt;
  if (!goal_pos) {
    result.status = PlanStatus::goal_off_grid;
    return result;
  }

  std::vector<Node> nodes;
  nodes.push_back({start.floor, *start_pos});
  nodes.push_back({goal.floor, *goal_pos});
  for (std::size_t i = 0; i < portals.size(); ++i) {
    const Portal& portal = portals[i];
    const NavGrid* ga = grid_of(portal.floor_a);
    const NavGrid* gb = grid_of(portal.floor_b);
    if (!ga || !gb || portal.floor_a == portal.floor_b) continue;
    const auto pa = snap(*ga, portal.point_a, options.snap_distance);
    const auto pb = snap(*gb, portal.point_b, options.snap_distance);
    if (!pa || !pb) continue;
    const int ia = static_cast<int>(nodes.size());
    nodes.push_back({portal.floor_a, *pa, static_cast<int>(i), ia + 1});
    nodes.push_back({portal.floor_b, *pb, static_cast<int>(i), ia});
  }

  const int n = static_cast<int>(nodes.size());
  std::map<std::pair<int, int>, std::optional<Path>> legs;
  auto leg = [&](int u, int v) -> const std::optional<Path>& {
    auto key = std::make_pair(u, v);
    auto it = legs.find(key);
    if (it == legs.end()) {
      it = legs.emplace(key, theta_star(*grid_of(nodes[u].floor), nodes[u].position, nodes[v].position)).first;
    }
    return it->second;
  };

  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  std::vector<int> prev(static_cast<std::size_t>(n), -1);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[0] = 0.0;
  queue.push({0.0, 0});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == 1) break;
    auto relax = [&](int v, double w) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        prev[v] = u;
        queue.push({dist[v], v});
      }
    };
    if (nodes[u].partner >= 0) {
      relax(nodes[u].partner, portals[nodes[u].portal].traversal_time * options.desired_speed);
    }
    for (int v = 1; v < n; ++v) {
      if (v == u || done[v] || nodes[v].floor != nodes[u].floor) continue;
      const auto& p = leg(u, v);
      if (p) relax(v, p->total_length);
    }
  }

  if (!std::isfinite(dist[1])) {
    result.status = PlanStatus::unreachable;
    return result;
  }

  std::vector<int> chain;
  for (int v = 1; v != -1; v = prev[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());

  Path& path = result.path;
  auto append = [&](const Waypoint& w) {
    if (!path.waypoints.empty() && path.waypoints.back().floor == w.floor && path.waypoints.back().point == w.point) {
      return;
    }
    path.waypoints.push_back(w);
  };

  if (*start_pos != start.point) {
    append({start.floor, start.point, {}});
    path.total_length += (*start_pos - start.point).norm();
  }
  append({nodes[0].floor, nodes[0].position, {}});
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const int u = chain[k - 1];
    const int v = chain[k];
    if (nodes[u].partner == v) {
      append({nodes[v].floor, nodes[v].position, portals[nodes[u].portal].id});
      path.portals.push_back(portals[nodes[u].portal].id);
      path.total_length += portals[nodes[u].portal].traversal_time * options.desired_speed;
      continue;
    }
    const auto& p = leg(u, v);
    for (const auto& w : p->waypoints) append(w);
    append({nodes[v].floor, nodes[v].position, {}});
    path.total_length += p->total_length;
  }
  if (*goal_pos != goal.point) {
    append({goal.floor, goal.point, {}});
    path.total_length += (*goal_pos - goal.point).norm();
  }
  result.status = PlanStatus::ok;
  return result;
}

Planner::Planner(const Environment& env, double cell_size, PlannerOptions options)
    : env_(env), options_(options) {
  for (const auto& floor : env.floors) grids_.emplace(floor.id, build_nav_grid(floor, cell_size));
}

PlanResult Planner::plan(const Location& start, const Location& goal) const {
  return plan_path(grids_, env_.portals, start, goal, options_);
}

double Planner::path_length(const Location& start, const Location& goal) const {
  auto cell_key = [&](const Location& l) {
    auto it = grids_.find(l.floor);
    if (it == grids_.end()) return -1;
    const Cell c = it->second.cell_of(l.point);
    return it->second.in_bounds(c) ? it->second.index(c) : -1;
  };
  const auto key = std::make_tuple(start.floor, cell_key(start), goal.floor, cell_key(goal));
  if (auto it = length_cache_.find(key); it != length_cache_.end()) return it->second;
  const PlanResult r = plan(start, goal);
  const double length = r.ok() ? r.path.total_length : kInf;
  length_cache_.emplace(key, length);
  return length;
}

const NavGrid& Planner::grid(const std::string& floor) const {
  auto it = grids_.find(floor);
  if (it == grids_.end()) throw std::out_of_range("no grid for floor '" + floor + "'");
  return it->second;
}

}  // namespace wayfind
