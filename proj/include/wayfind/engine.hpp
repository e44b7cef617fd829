#pragma once

#include "wayfind/attention.hpp"
#include "wayfind/behavior.hpp"
#include "wayfind/config.hpp"
#include "wayfind/environment.hpp"
#include "wayfind/perception.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wayfind {

struct TrajectoryRow {
  int replication = 0;
  AgentId agent = 0;
  double t = 0.0;
  std::string floor;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  NavMode mode = NavMode::exploring;
  int leg = 1;           // 1-based
  std::string goal;      // "target", a goal/base point id, or "-"
};

struct SignEventRow {
  int replication = 0;
  AgentId agent = 0;
  double t = 0.0;
  SignId sign = 0;       // 0: nothing was visible this perception tick
  double attention = 0.0;
  std::optional<double> threshold;
  bool seen = false;
  std::optional<SignCategory> category;
  std::string decision;  // "triggered", "chosen" or "-"
};

struct LegMetric {
  int replication = 0;
  AgentId agent = 0;
  int leg = 1;  // 1-based
  bool completed = false;
  double travel_time = 0.0;
  double path_length = 0.0;
};

using Heatmap = Raster<std::uint32_t>;  // (row = grid y, col = grid x)

struct RunLogs {
  int replication = 0;
  std::vector<TrajectoryRow> trajectory;
  std::vector<SignEventRow> sign_events;
  std::vector<LegMetric> metrics;
  std::map<std::string, Heatmap> heatmaps;
  std::vector<std::string> notes;  // timeout reasons and similar
};

/// Channel maps of one perception tick, for debug dumps.
struct PerceptionFrame {
  int replication;
  AgentId agent;
  long tick;
  const RenderedView& view;
  const AttentionMap& saliency;
  const AttentionMap& semantic;
  const AttentionMap& frustum;
  const AttentionMap& fused;
};
using PerceptionObserver = std::function<void(const PerceptionFrame&)>;

/// Per-leg metrics derived from trajectory rows of one agent-run.
/// travel_time(L) = t(last row of L) - t(last row of L-1), with the run's first row as origin;
/// path_length(L) sums displacements between consecutive rows that are both in leg L and on
/// the same floor; a leg is completed when one of its rows is marked Arrived.
std::vector<LegMetric> leg_metrics(std::span<const TrajectoryRow> agent_rows);

/// One replication of the sense-plan-act loop for every agent.
RunLogs run_replication(const Environment& env, const Task& task, const SimulationConfig& config, int replication,
                        const PerceptionObserver& observer = {});

struct LegAggregate {
  int leg = 1;
  int attempted = 0;
  int completed = 0;
  double completion_rate = 0.0;
  double travel_time_median = 0.0;
  double travel_time_p90 = 0.0;
  double path_length_median = 0.0;
  double path_length_p90 = 0.0;
};

struct SignAudit {
  SignId sign = 0;
  double seen_fraction = 0.0;
  double mean_attention_when_visible = 0.0;
  long decisions_triggered = 0;
};

struct BatchResult {
  std::vector<RunLogs> runs;  // ordered by replication index
  std::vector<LegAggregate> legs;
  std::vector<SignAudit> audit;  // every sign, by id
  int agent_runs = 0;
  int all_legs_completed = 0;
};

/// Linear-interpolation percentile (q in [0,1]); 0 for an empty sample.
double percentile(std::vector<double> values, double q);

std::vector<LegAggregate> aggregate_legs(std::span<const RunLogs> runs, std::size_t leg_count);
std::vector<SignAudit> audit_signs(const Environment& env, std::span<const RunLogs> runs, int agent_runs);

struct BatchOptions {
  /// Execution order of replication indices; empty runs 0..replications-1.
  std::vector<int> order;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  PerceptionObserver observer;
};

/// Runs every replication and aggregates. Results do not depend on order or thread count.
BatchResult run_batch(const Environment& env, const Task& task, const SimulationConfig& config,
                      const BatchOptions& options = {});

}  // namespace wayfind
