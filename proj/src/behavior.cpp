#include "wayfind/behavior.hpp"

#include "wayfind/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wayfind {

std::string to_string(SignCategory c) {
  switch (c) {
    case SignCategory::at_target: return "at_target";
    case SignCategory::directional_clue: return "directional_clue";
    case SignCategory::irrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::string to_string(NavMode m) {
  switch (m) {
    case NavMode::exploring: return "Exploring";
    case NavMode::following_clue: return "FollowingClue";
    case NavMode::target_known: return "TargetKnown";
    case NavMode::arrived: return "Arrived";
    case NavMode::timed_out: return "TimedOut";
  }
  return "Exploring";
}

int mode_rank(NavMode m) {
  switch (m) {
    case NavMode::exploring: return 0;
    case NavMode::following_clue: return 1;
    case NavMode::target_known: return 2;
    case NavMode::arrived:
    case NavMode::timed_out: return 3;
  }
  return 0;
}

double threshold_draw(std::uint64_t master_seed, std::uint64_t replication, AgentId agent, SignId sign) {
  return unit_double(hash_keys({master_seed, replication, agent, sign}));
}

ThresholdTable ThresholdTable::draw(std::span<const AgentId> agents, std::span<const SignId> signs,
                                    std::uint64_t master_seed, std::uint64_t replication) {
  ThresholdTable table;
  for (AgentId a : agents) {
    for (SignId s : signs) table.values_[{a, s}] = threshold_draw(master_seed, replication, a, s);
  }
  return table;
}

double ThresholdTable::at(AgentId agent, SignId sign) const {
  auto it = values_.find({agent, sign});
  if (it == values_.end()) {
    throw std::out_of_range("no threshold for agent " + std::to_string(agent) + ", sign " + std::to_string(sign));
  }
  return it->second;
}

namespace {

bool iequals(const std::string& a, const std::string& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

const SignEntry* matching_entry(const Sign& sign, const Leg& leg, SignEntry::Action action) {
  for (const auto& e : sign.entries) {
    if (e.action == action && iequals(e.label, leg.target_label)) return &e;
  }
  return nullptr;
}

}  // namespace

SignCategory categorize_sign(const Sign& sign, const Leg& leg) {
  if (matching_entry(sign, leg, SignEntry::Action::at_target)) return SignCategory::at_target;
  if (matching_entry(sign, leg, SignEntry::Action::direct_to)) return SignCategory::directional_clue;
  return SignCategory::irrelevant;
}

std::vector<Candidate> classify(std::span<const SignScore> scores, const ThresholdTable& thresholds, AgentId agent,
                                const Leg& leg, const Environment& env) {
  std::vector<Candidate> out;
  out.reserve(scores.size());
  for (const auto& score : scores) {
    const Sign& sign = env.sign(score.sign);
    Candidate c;
    c.sign = score.sign;
    c.attention = score.attention;
    c.threshold = thresholds.at(agent, score.sign);
    c.category = categorize_sign(sign, leg);
    if (c.category == SignCategory::directional_clue) {
      c.clue_goal = matching_entry(sign, leg, SignEntry::Action::direct_to)->goal_point;
    }
    c.seen = c.attention >= c.threshold;
    out.push_back(std::move(c));
  }
  return out;
}

Decision decide(std::span<const Candidate> candidates, const Leg& leg, const NavState& state,
                const Environment& env) {
  Decision d;
  d.candidates.assign(candidates.begin(), candidates.end());
  for (auto& c : d.candidates) c.seen = c.attention >= c.threshold;

  const Candidate* best = nullptr;
  for (const auto& c : d.candidates) {
    if (!c.seen || c.category == SignCategory::irrelevant) continue;
    // A clue whose goal was already reached in this leg carries no new information.
    if (c.category == SignCategory::directional_clue && state.reached_clue_goals.count(c.clue_goal)) continue;
    if (best == nullptr || c.category < best->category ||
        (c.category == best->category &&
         (c.attention > best->attention || (c.attention == best->attention && c.sign < best->sign)))) {
      best = &c;
    }
  }

  auto keep_current = [&] {
    d.mode = state.mode;
    d.clue_goal = state.clue_goal;
    if (state.mode == NavMode::target_known) {
      d.goal = leg.target;
    } else if (state.mode == NavMode::following_clue && state.clue_active) {
      const NamedPoint& gp = *env.find_goal_point(state.clue_goal);
      d.goal = Location{gp.floor, gp.position};
    }
  };

  if (state.mode == NavMode::target_known) {
    keep_current();
    if (best != nullptr && best->category == SignCategory::at_target) d.chosen_sign = best->sign;
    return d;
  }
  if (best != nullptr && best->category == SignCategory::at_target) {
    d.chosen_sign = best->sign;
    d.mode = NavMode::target_known;
    d.goal = leg.target;
    d.clue_goal = state.clue_goal;
    d.goal_changed = true;
    return d;
  }
  if (best != nullptr && !(state.mode == NavMode::following_clue && state.clue_active)) {
    const NamedPoint* gp = env.find_goal_point(best->clue_goal);
    if (gp == nullptr) throw std::out_of_range("sign " + std::to_string(best->sign) + " points to unknown goal");
    d.chosen_sign = best->sign;
    d.mode = NavMode::following_clue;
    d.clue_goal = best->clue_goal;
    d.goal = Location{gp->floor, gp->position};
    d.goal_changed = true;
    return d;
  }
  keep_current();
  return d;
}

Decision decide(std::span<const SignScore> scores, const ThresholdTable& thresholds, AgentId agent, const Leg& leg,
                const NavState& state, const Environment& env) {
  const auto candidates = classify(scores, thresholds, agent, leg, env);
  return decide(candidates, leg, state, env);
}

void apply_decision(const Decision& decision, NavState& state) {
  if (!decision.goal_changed) return;
  state.mode = decision.mode;
  if (decision.mode == NavMode::following_clue) {
    state.clue_goal = decision.clue_goal;
    state.clue_active = true;
  }
}

std::optional<NamedPoint> next_exploration_goal(NavState& state, std::span<const NamedPoint> base_points,
                                                const PathLengthFn& path_length, const PathLengthFn& lower_bound) {
  if (base_points.empty()) throw std::invalid_argument("no base points defined for exploration");
  const bool all_visited = std::all_of(base_points.begin(), base_points.end(), [&](const NamedPoint& p) {
    return state.visited_base_points.count(p.id) > 0;
  });
  if (all_visited) state.visited_base_points.clear();

  // Candidates in order of their bound; stop once no remaining bound can beat the best length.
  struct Candidate {
    double bound;
    std::size_t index;
  };
  std::vector<Candidate> order;
  for (std::size_t i = 0; i < base_points.size(); ++i) {
    if (state.visited_base_points.count(base_points[i].id)) continue;
    order.push_back({lower_bound ? lower_bound(base_points[i]) : 0.0, i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const Candidate& a, const Candidate& b) { return a.bound < b.bound; });

  std::optional<std::size_t> best;
  double best_length = std::numeric_limits<double>::infinity();
  for (const auto& c : order) {
    if (c.bound > best_length) break;
    const double length = path_length(base_points[c.index]);
    if (length < best_length || (length == best_length && best && c.index < *best)) {
      best_length = length;
      best = c.index;
    }
  }
  if (!best || !std::isfinite(best_length)) return std::nullopt;
  return base_points[*best];
}

}  // namespace wayfind
