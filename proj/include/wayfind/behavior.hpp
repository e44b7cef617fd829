#pragma once

#include "wayfind/attention.hpp"
#include "wayfind/environment.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace wayfind {

using AgentId = std::uint32_t;

/// Lower value is higher priority.
enum class SignCategory { at_target = 1, directional_clue = 2, irrelevant = 3 };

enum class NavMode { exploring, following_clue, target_known, arrived, timed_out };

std::string to_string(SignCategory c);
std::string to_string(NavMode m);

/// Rank used for the upgrade-only rule: exploring < following_clue < target_known.
int mode_rank(NavMode m);

/// Recognition threshold for one (agent, sign) pair; a pure function of its keys.
double threshold_draw(std::uint64_t master_seed, std::uint64_t replication, AgentId agent, SignId sign);

/// Per-agent, per-sign recognition thresholds, fixed for a whole run.
class ThresholdTable {
 public:
  ThresholdTable() = default;

  static ThresholdTable draw(std::span<const AgentId> agents, std::span<const SignId> signs,
                             std::uint64_t master_seed, std::uint64_t replication);

  /// Throws std::out_of_range when the pair was not drawn.
  double at(AgentId agent, SignId sign) const;
  void set(AgentId agent, SignId sign, double value) { values_[{agent, sign}] = value; }
  std::size_t size() const { return values_.size(); }

 private:
  std::map<std::pair<AgentId, SignId>, double> values_;
};

struct NavState {
  NavMode mode = NavMode::exploring;
  std::string clue_goal;     // goal point id of the current or last clue
  bool clue_active = false;  // the clue goal has not been reached yet
  std::set<std::string> reached_clue_goals;
  std::set<std::string> visited_base_points;
  std::size_t current_leg = 0;
};

SignCategory categorize_sign(const Sign& sign, const Leg& leg);

/// A sign in view this tick, classified against the current leg.
struct Candidate {
  SignId sign = 0;
  double attention = 0.0;
  double threshold = 1.0;
  SignCategory category = SignCategory::irrelevant;
  std::string clue_goal;  // for directional clues
  bool seen = false;
};

struct Decision {
  std::optional<SignId> chosen_sign;
  NavMode mode = NavMode::exploring;
  std::optional<Location> goal;  // empty: keep exploring base points
  std::string clue_goal;
  bool goal_changed = false;
  std::vector<Candidate> candidates;
};

/// Classifies scored signs for an agent, marking which pass their recognition threshold.
std::vector<Candidate> classify(std::span<const SignScore> scores, const ThresholdTable& thresholds, AgentId agent,
                                const Leg& leg, const Environment& env);

/// Picks the highest-priority recognized sign: category first, then attention, then lower id.
/// Modes only upgrade within a leg, and an unreached clue goal is kept until it is reached.
Decision decide(std::span<const Candidate> candidates, const Leg& leg, const NavState& state,
                const Environment& env);

Decision decide(std::span<const SignScore> scores, const ThresholdTable& thresholds, AgentId agent, const Leg& leg,
                const NavState& state, const Environment& env);

void apply_decision(const Decision& decision, NavState& state);

/// Planned path length from the agent to a base point; infinity when unreachable.
using PathLengthFn = std::function<double(const NamedPoint&)>;

/// Nearest unvisited base point by planned path length, ties by declaration order. Resets the
/// visited set once every point has been visited. Empty when no base point is reachable.
/// Throws std::invalid_argument when there are no base points at all.
/// `lower_bound`, when given, must never exceed `path_length`; it only prunes evaluations and
/// never changes the result.
std::optional<NamedPoint> next_exploration_goal(NavState& state, std::span<const NamedPoint> base_points,
                                                const PathLengthFn& path_length,
                                                const PathLengthFn& lower_bound = {});

}  // namespace wayfind
