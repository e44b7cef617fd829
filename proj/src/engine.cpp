#include "wayfind/engine.hpp"

#include "wayfind/nav_grid.hpp"
#include "wayfind/planner.hpp"
#include "wayfind/social_force.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

namespace wayfind {

int SimulationConfig::perception_every() const {
  return std::max(1, static_cast<int>(std::lround(perception_interval / dt)));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNeighborRange = 5.0;   // m, social-force interaction cutoff
constexpr double kWallRange = 3.0;       // m, wall interaction cutoff
constexpr double kHeadingSpeed = 0.1;    // m/s, below this the camera keeps its heading
constexpr double kStallWindow = 5.0;     // s without progress before replanning
constexpr double kStallProgress = 0.05;  // m
constexpr double kCornerRange = 1.5;     // m, distance within which a corner waypoint may be cut

enum class GoalKind { none, target, clue, base };

struct Agent {
  AgentId id = 0;
  std::string floor;
  Body body;
  Vec2 heading = Vec2::UnitX();
  NavState nav;
  bool active = true;
  std::string failure;

  GoalKind goal_kind = GoalKind::none;
  std::string goal_name;
  Location goal;
  Path path;
  std::size_t next_waypoint = 0;
  double transit_remaining = 0.0;

  long leg_start_tick = 0;
  double best_distance = kInf;
  double stall_time = 0.0;
};

Vec2 heading_from_degrees(double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  return {std::cos(r), std::sin(r)};
}

double min_wall_distance(std::span<const Segment> walls, const Vec2& p) {
  double best = kInf;
  for (const auto& w : walls) best = std::min(best, distance_to_segment(w, p));
  return best;
}

// Deterministic hexagonal-ring placement around a spawn point.
std::vector<Vec2> spawn_slots(const Floor& floor, std::span<const Segment> walls, const Vec2& center, int count,
                              double spacing, double radius) {
  std::vector<Vec2> slots;
  const bool center_ok = floor.walkable(center);
  for (int ring = 0; ring < 64 && static_cast<int>(slots.size()) < count; ++ring) {
    const int n = ring == 0 ? 1 : 6 * ring;
    for (int j = 0; j < n && static_cast<int>(slots.size()) < count; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / n;
      const Vec2 p = center + ring * spacing * Vec2(std::cos(angle), std::sin(angle));
      if (!floor.walkable(p) || min_wall_distance(walls, p) < radius + 0.05) continue;
      if (center_ok && ring > 0 && !line_of_sight(floor, center, p)) continue;
      slots.push_back(p);
    }
  }
  while (static_cast<int>(slots.size()) < count) slots.push_back(center);
  return slots;
}

std::string goal_label(const Agent& a) {
  switch (a.goal_kind) {
    case GoalKind::none: return "-";
    case GoalKind::target: return "target";
    case GoalKind::clue:
    case GoalKind::base: return a.goal_name;
  }
  return "-";
}

class Replication {
 public:
  Replication(const Environment& env, const Task& task, const SimulationConfig& config, int replication,
              const PerceptionObserver& observer)
      : env_(env),
        task_(task),
        config_(config),
        replication_(replication),
        observer_(observer),
        planner_(env, config.cell_size, PlannerOptions{config.social_force.desired_speed, 2.0}),
        frustum_(frustum_map(config.camera.raster_width, config.camera.raster_height, config.camera,
                             config.frustum)),
        kappa_(config.effective_kappa()) {}

  RunLogs run();

 private:
  void start_leg(Agent& a, long tick);
  void perceive(Agent& a, long tick, double t);
  void set_goal(Agent& a, GoalKind kind, const std::string& name, const Location& where);
  void choose_exploration_goal(Agent& a);
  double length_bound(const Location& from, const NamedPoint& to) const;
  void on_goal_reached(Agent& a);
  void advance_waypoints(Agent& a);
  bool waypoint_passed(const Agent& a) const;
  void fail(Agent& a, std::string reason);
  Vec2 steering_point(const Agent& a) const;
  void log_row(const Agent& a, double t, NavMode mode);

  const Environment& env_;
  const Task& task_;
  const SimulationConfig& config_;
  int replication_;
  const PerceptionObserver& observer_;
  Planner planner_;
  AttentionMap frustum_;
  double kappa_;
  ThresholdTable thresholds_;
  std::vector<Agent> agents_;
  std::map<std::string, std::vector<Vec2>> slot_cache_;
  RunLogs logs_;
};

void Replication::fail(Agent& a, std::string reason) {
  if (a.failure.empty()) a.failure = std::move(reason);
}

void Replication::start_leg(Agent& a, long tick) {
  const std::size_t leg_index = a.nav.current_leg;
  a.nav = NavState{};
  a.nav.current_leg = leg_index;
  a.leg_start_tick = tick;
  a.goal_kind = GoalKind::none;
  a.goal_name.clear();
  a.path = Path{};
  a.next_waypoint = 0;
  a.best_distance = kInf;
  a.stall_time = 0.0;

  const Leg& leg = task_.legs[leg_index];
  if (!leg.start) return;
  const NamedPoint& start = *env_.find_named_point(*leg.start);
  auto it = slot_cache_.find(start.id);
  if (it == slot_cache_.end()) {
    const Floor& floor = env_.floor(start.floor);
    it = slot_cache_
             .emplace(start.id, spawn_slots(floor, env_.walls(start.floor), start.position,
                                            config_.agents_per_replication, config_.spawn_spacing,
                                            config_.social_force.body_radius))
             .first;
  }
  a.floor = start.floor;
  a.body.position = it->second[a.id];
  a.body.velocity = Vec2::Zero();
  a.heading = heading_from_degrees(start.heading_deg);
  a.transit_remaining = 0.0;
}

void Replication::set_goal(Agent& a, GoalKind kind, const std::string& name, const Location& where) {
  a.goal_kind = kind;
  a.goal_name = name;
  a.goal = where;
  a.best_distance = kInf;
  a.stall_time = 0.0;
  const PlanResult r = planner_.plan({a.floor, a.body.position}, where);
  if (!r.ok()) {
    fail(a, "no path to " + (name.empty() ? std::string("target") : name) + " (" + to_string(r.status) + ")");
    a.path = Path{};
    a.next_waypoint = 0;
    return;
  }
  a.path = r.path;
  a.next_waypoint = a.path.waypoints.empty() ? 0 : 1;
}

double Replication::length_bound(const Location& from, const NamedPoint& to) const {
  // Path lengths are memoized per grid cell, so the bound leaves room for two cell diagonals.
  const double slack = 2.0 * std::numbers::sqrt2 * config_.cell_size;
  if (from.floor == to.floor) return std::max(0.0, (to.position - from.point).norm() - slack);
  const double v0 = config_.social_force.desired_speed;
  double leave = kInf, enter = kInf;
  for (const auto& p : env_.portals) {
    const double cost = p.traversal_time * v0;
    for (const auto& [floor, point] : {std::pair{p.floor_a, p.point_a}, std::pair{p.floor_b, p.point_b}}) {
      if (floor == from.floor) leave = std::min(leave, (point - from.point).norm() + cost);
      if (floor == to.floor) enter = std::min(enter, (point - to.position).norm() + cost);
    }
  }
  const double bound = std::max(leave, enter);
  return std::isfinite(bound) ? std::max(0.0, bound - slack) : 0.0;
}

void Replication::choose_exploration_goal(Agent& a) {
  const Location here{a.floor, a.body.position};
  auto next = next_exploration_goal(
      a.nav, env_.base_points,
      [&](const NamedPoint& p) { return planner_.path_length(here, {p.floor, p.position}); },
      [&](const NamedPoint& p) { return length_bound(here, p); });
  if (!next) {
    fail(a, "no reachable base point");
    return;
  }
  set_goal(a, GoalKind::base, next->id, {next->floor, next->position});
}

void Replication::on_goal_reached(Agent& a) {
  if (a.goal_kind == GoalKind::clue) {
    a.nav.reached_clue_goals.insert(a.goal_name);
    if (a.nav.clue_goal == a.goal_name) a.nav.clue_active = false;
  } else if (a.goal_kind == GoalKind::base) {
    a.nav.visited_base_points.insert(a.goal_name);
  } else {
    return;
  }
  a.goal_kind = GoalKind::none;
  choose_exploration_goal(a);
}

void Replication::perceive(Agent& a, long tick, double t) {
  const CameraPose pose{a.floor, a.body.position, config_.eye_height, a.heading};
  const RenderedView view = render_view(env_, pose, config_.camera);
  std::vector<SignScore> scores;
  // Scores only exist for sign pixels, so an empty mask needs no attention maps.
  if (observer_ || (view.mask.ids != 0).any()) {
    const AttentionMap sal = saliency_map(view.raster);
    const AttentionMap sem = semantic_map(view.mask, env_);
    const AttentionMap fused = fuse_attention(sal, sem, frustum_, config_.fusion);
    scores = score_signs(fused, view.mask, kappa_);
    if (observer_) observer_(PerceptionFrame{replication_, a.id, tick, view, sal, sem, frustum_, fused});
  }

  const Leg& leg = task_.legs[a.nav.current_leg];
  const Decision d = decide(scores, thresholds_, a.id, leg, a.nav, env_);

  if (d.candidates.empty()) {
    logs_.sign_events.push_back({replication_, a.id, t, 0, 0.0, std::nullopt, false, std::nullopt, "-"});
  }
  for (const auto& c : d.candidates) {
    std::string label = "-";
    if (d.chosen_sign && *d.chosen_sign == c.sign) label = d.goal_changed ? "triggered" : "chosen";
    logs_.sign_events.push_back({replication_, a.id, t, c.sign, c.attention, c.threshold, c.seen, c.category, label});
  }

  apply_decision(d, a.nav);
  if (d.goal_changed && d.goal) {
    if (d.mode == NavMode::target_known) {
      set_goal(a, GoalKind::target, "target", *d.goal);
    } else {
      set_goal(a, GoalKind::clue, d.clue_goal, *d.goal);
    }
  } else if (a.goal_kind == GoalKind::none) {
    choose_exploration_goal(a);
  }
}

Vec2 Replication::steering_point(const Agent& a) const {
  if (a.next_waypoint < a.path.waypoints.size()) return a.path.waypoints[a.next_waypoint].point;
  if (a.goal_kind == GoalKind::target && !a.path.waypoints.empty()) return a.path.waypoints.back().point;
  return a.body.position;
}

bool Replication::waypoint_passed(const Agent& a) const {
  const auto& wps = a.path.waypoints;
  const Waypoint& wp = wps[a.next_waypoint];
  if (wp.floor != a.floor) return false;
  const double d = (a.body.position - wp.point).norm();
  if (d <= config_.waypoint_tolerance) return true;
  // Near a corner waypoint, move on once the following waypoint is in plain sight: wall
  // repulsion can keep the body from ever entering the tolerance disc of a waypoint
  // that hugs an obstacle.
  if (d > kCornerRange || a.next_waypoint + 1 >= wps.size()) return false;
  const Waypoint& following = wps[a.next_waypoint + 1];
  if (!following.portal.empty() || following.floor != a.floor) return false;
  return line_of_sight(env_.floor(a.floor), a.body.position, following.point);
}

void Replication::advance_waypoints(Agent& a) {
  const auto& wps = a.path.waypoints;
  while (a.next_waypoint < wps.size()) {
    if (!waypoint_passed(a)) break;
    ++a.next_waypoint;
    a.best_distance = kInf;
    a.stall_time = 0.0;
    if (a.next_waypoint < wps.size() && !wps[a.next_waypoint].portal.empty()) {
      const std::string& id = wps[a.next_waypoint].portal;
      const auto it = std::find_if(env_.portals.begin(), env_.portals.end(),
                                   [&](const Portal& p) { return p.id == id; });
      a.transit_remaining = it->traversal_time;
      a.body.velocity = Vec2::Zero();
      return;
    }
  }
  if (a.next_waypoint >= wps.size() && (a.goal_kind == GoalKind::clue || a.goal_kind == GoalKind::base)) {
    on_goal_reached(a);
  }
}

void Replication::log_row(const Agent& a, double t, NavMode mode) {
  logs_.trajectory.push_back({replication_, a.id, t, a.floor, a.body.position.x(), a.body.position.y(),
                              a.body.velocity.norm(), mode, static_cast<int>(a.nav.current_leg) + 1,
                              goal_label(a)});
}

RunLogs Replication::run() {
  logs_.replication = replication_;
  const int n = config_.agents_per_replication;
  std::vector<AgentId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(static_cast<AgentId>(i));
  std::vector<SignId> sign_ids;
  for (const auto& s : env_.signs) sign_ids.push_back(s.id);
  thresholds_ = ThresholdTable::draw(ids, sign_ids, config_.master_seed, static_cast<std::uint64_t>(replication_));

  agents_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    agents_[i].id = static_cast<AgentId>(i);
    agents_[i].nav.current_leg = 0;
    start_leg(agents_[i], 0);
  }

  const double dt = config_.dt;
  const int every = config_.perception_every();
  const long timeout_ticks = static_cast<long>(std::ceil(config_.leg_timeout / dt - 1e-9));
  const long max_ticks = timeout_ticks * static_cast<long>(task_.legs.size()) + 2;
  const auto& sf = config_.social_force;

  for (long tick = 0; tick <= max_ticks; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    bool any_active = false;

    for (auto& a : agents_) {
      if (!a.active) continue;
      const bool in_transit = a.transit_remaining > 0.0;
      if (tick % every == 0 && !in_transit && a.failure.empty()) perceive(a, tick, t);

      const Leg& leg = task_.legs[a.nav.current_leg];
      const bool arrived = !in_transit && a.floor == leg.target.floor &&
                           (a.body.position - leg.target.point).norm() <= leg.arrival_radius;
      const bool timed_out =
          !arrived && (!a.failure.empty() || tick - a.leg_start_tick >= timeout_ticks);
      log_row(a, t, arrived ? NavMode::arrived : (timed_out ? NavMode::timed_out : a.nav.mode));

      if (arrived) {
        ++a.nav.current_leg;
        if (a.nav.current_leg >= task_.legs.size()) {
          a.nav.mode = NavMode::arrived;
          a.active = false;
          continue;
        }
        start_leg(a, tick);
      } else if (timed_out) {
        a.nav.mode = NavMode::timed_out;
        a.active = false;
        logs_.notes.push_back("replication " + std::to_string(replication_) + " agent " + std::to_string(a.id) +
                              " leg " + std::to_string(a.nav.current_leg + 1) + " timed out" +
                              (a.failure.empty() ? "" : ": " + a.failure));
        continue;
      }
      any_active = true;
    }
    if (!any_active) break;

    // Synchronous update against a frozen snapshot of all bodies.
    std::vector<Body> next(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const Agent& a = agents_[i];
      next[i] = a.body;
      if (!a.active || a.transit_remaining > 0.0) continue;
      std::vector<Body> neighbors;
      for (std::size_t j = 0; j < agents_.size(); ++j) {
        const Agent& b = agents_[j];
        if (j == i || !b.active || b.transit_remaining > 0.0 || b.floor != a.floor) continue;
        if ((b.body.position - a.body.position).norm() > kNeighborRange) continue;
        neighbors.push_back(b.body);
      }
      std::vector<Segment> walls;
      for (const auto& w : env_.walls(a.floor)) {
        if (distance_to_segment(w, a.body.position) <= kWallRange) walls.push_back(w);
      }
      next[i] = social_force_step(a.body, neighbors, walls, steering_point(a), sf, dt);
    }

    for (std::size_t i = 0; i < agents_.size(); ++i) {
      Agent& a = agents_[i];
      if (!a.active) continue;
      if (a.transit_remaining > 0.0) {
        a.transit_remaining -= dt;
        if (a.transit_remaining <= 1e-9) {
          a.transit_remaining = 0.0;
          const Waypoint& exit = a.path.waypoints[a.next_waypoint];
          a.floor = exit.floor;
          a.body.position = exit.point;
          a.body.velocity = Vec2::Zero();
          resolve_wall_contacts(a.body, env_.walls(a.floor), sf.body_radius);
          ++a.next_waypoint;
          advance_waypoints(a);
        }
        continue;
      }
      a.body = next[i];
      const double speed = a.body.velocity.norm();
      if (speed > kHeadingSpeed) a.heading = a.body.velocity / speed;
      if (!a.failure.empty()) continue;
      advance_waypoints(a);

      // Replan when the agent stops making progress toward its steering point.
      if (a.goal_kind != GoalKind::none && a.transit_remaining <= 0.0) {
        const double d = (steering_point(a) - a.body.position).norm();
        if (d < a.best_distance - kStallProgress) {
          a.best_distance = d;
          a.stall_time = 0.0;
        } else if ((a.stall_time += dt) > kStallWindow && d > config_.waypoint_tolerance) {
          set_goal(a, a.goal_kind, a.goal_name, a.goal);
        }
      }
    }
  }

  // Metrics and heatmaps from the logged rows.
  std::map<AgentId, std::vector<TrajectoryRow>> by_agent;
  for (const auto& row : logs_.trajectory) by_agent[row.agent].push_back(row);
  for (auto& [id, rows] : by_agent) {
    for (auto m : leg_metrics(rows)) {
      m.replication = replication_;
      m.agent = id;
      logs_.metrics.push_back(m);
    }
  }
  for (const auto& [floor_id, grid] : planner_.grids()) {
    logs_.heatmaps.emplace(floor_id, Heatmap::Zero(grid.height(), grid.width()));
  }
  for (const auto& row : logs_.trajectory) {
    const NavGrid& grid = planner_.grid(row.floor);
    const Cell c = grid.cell_of({row.x, row.y});
    if (grid.in_bounds(c)) ++logs_.heatmaps[row.floor](c.y, c.x);
  }
  return std::move(logs_);
}

}  // namespace

std::vector<LegMetric> leg_metrics(std::span<const TrajectoryRow> rows) {
  std::vector<LegMetric> out;
  if (rows.empty()) return out;
  double previous_end = rows.front().t;
  std::size_t i = 0;
  while (i < rows.size()) {
    LegMetric m;
    m.replication = rows[i].replication;
    m.agent = rows[i].agent;
    m.leg = rows[i].leg;
    std::size_t j = i;
    for (; j < rows.size() && rows[j].leg == m.leg; ++j) {
      if (rows[j].mode == NavMode::arrived) m.completed = true;
      if (j > i && rows[j].floor == rows[j - 1].floor) {
        m.path_length += std::hypot(rows[j].x - rows[j - 1].x, rows[j].y - rows[j - 1].y);
      }
    }
    m.travel_time = rows[j - 1].t - previous_end;
    previous_end = rows[j - 1].t;
    out.push_back(m);
    i = j;
  }
  return out;
}

RunLogs run_replication(const Environment& env, const Task& task, const SimulationConfig& config, int replication,
                        const PerceptionObserver& observer) {
  if (task.legs.empty()) throw std::invalid_argument("task has no legs");
  if (!task.legs.front().start) throw std::invalid_argument("the first leg needs a start point");
  Replication r(env, task, config, replication, observer);
  return r.run();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<LegAggregate> aggregate_legs(std::span<const RunLogs> runs, std::size_t leg_count) {
  std::vector<LegAggregate> out(leg_count);
  std::vector<std::vector<double>> times(leg_count), lengths(leg_count);
  for (std::size_t l = 0; l < leg_count; ++l) out[l].leg = static_cast<int>(l) + 1;
  for (const auto& run : runs) {
    for (const auto& m : run.metrics) {
      const auto l = static_cast<std::size_t>(m.leg - 1);
      if (l >= leg_count) continue;
      ++out[l].attempted;
      if (m.completed) ++out[l].completed;
      times[l].push_back(m.travel_time);
      lengths[l].push_back(m.path_length);
    }
  }
  for (std::size_t l = 0; l < leg_count; ++l) {
    auto& a = out[l];
    a.completion_rate = a.attempted ? static_cast<double>(a.completed) / a.attempted : 0.0;
    a.travel_time_median = percentile(times[l], 0.5);
    a.travel_time_p90 = percentile(times[l], 0.9);
    a.path_length_median = percentile(lengths[l], 0.5);
    a.path_length_p90 = percentile(lengths[l], 0.9);
  }
  return out;
}

std::vector<SignAudit> audit_signs(const Environment& env, std::span<const RunLogs> runs, int agent_runs) {
  struct Acc {
    std::set<std::pair<int, AgentId>> seen_by;
    double attention_sum = 0.0;
    long visible = 0;
    long triggered = 0;
  };
  std::map<SignId, Acc> acc;
  for (const auto& s : env.signs) acc[s.id];
  for (const auto& run : runs) {
    for (const auto& e : run.sign_events) {
      if (e.sign == 0) continue;
      auto& a = acc[e.sign];
      a.attention_sum += e.attention;
      ++a.visible;
      if (e.seen) a.seen_by.insert({e.replication, e.agent});
      if (e.decision == "triggered") ++a.triggered;
    }
  }
  std::vector<SignAudit> out;
  for (const auto& [id, a] : acc) {
    SignAudit s;
    s.sign = id;
    s.seen_fraction = agent_runs > 0 ? static_cast<double>(a.seen_by.size()) / agent_runs : 0.0;
    s.mean_attention_when_visible = a.visible ? a.attention_sum / static_cast<double>(a.visible) : 0.0;
    s.decisions_triggered = a.triggered;
    out.push_back(s);
  }
  return out;
}

BatchResult run_batch(const Environment& env, const Task& task, const SimulationConfig& config,
                      const BatchOptions& options) {
  if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
  std::vector<int> order = options.order;
  if (order.empty()) {
    for (int r = 0; r < config.replications; ++r) order.push_back(r);
  }

  BatchResult result;
  result.runs.resize(static_cast<std::size_t>(config.replications));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      const int r = order[k];
      result.runs[static_cast<std::size_t>(r)] = run_replication(env, task, config, r, options.observer);
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(order.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.agent_runs = config.replications * config.agents_per_replication;
  result.legs = aggregate_legs(result.runs, task.legs.size());
  result.audit = audit_signs(env, result.runs, result.agent_runs);
  for (const auto& run : result.runs) {
    std::map<AgentId, int> done;
    for (const auto& m : run.metrics) {
      if (m.completed) ++done[m.agent];
    }
    for (const auto& [agent, count] : done) {
      if (count == static_cast<int>(task.legs.size())) ++result.all_legs_completed;
    }
  }
  return result;
}

}  // namespace wayfind
