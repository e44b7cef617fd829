#include "wayfind/engine.hpp"
#include "wayfind/scenario.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <map>
#include <set>

using namespace wayfind;
using json = nlohmann::json;

namespace {

// A 20 m x 10 m hall: spawn at (2,5) facing +x, the target 10 m ahead, an at-target sign on
// the far wall facing the spawn. The only base point sits on the target, so even an agent
// that never recognizes the sign walks straight there.
json corridor_doc() {
  return json::parse(R"({
    "floors": [{"id": "hall", "outline": [[0, 0], [20, 0], [20, 10], [0, 10]]}],
    "signs": [{"id": 1, "floor": "hall", "center": [19.95, 5, 1.8], "facing_deg": 180, "width": 2,
               "height": 1, "face_color": [0.1, 0.3, 0.9], "object_class": "signage",
               "entries": [{"label": "Exit", "action": "at_target"}]}],
    "base_points": [{"id": "b", "floor": "hall", "position": [12, 5]}],
    "goal_points": [{"id": "spawn", "floor": "hall", "position": [2, 5], "heading_deg": 0}],
    "task": {"legs": [{"start": "spawn", "target_label": "Exit",
                       "target": {"floor": "hall", "point": [12, 5]}, "arrival_radius": 0.3}]},
    "config": {"dt": 0.05, "perception_interval": 0.5, "leg_timeout": 60, "replications": 1,
               "master_seed": 3, "agents_per_replication": 1}
  })");
}

Scenario scenario(const json& doc) { return load_scenario(doc.dump()); }

RunLogs run_one(const Scenario& s, int replication = 0) {
  return run_replication(s.environment, s.task, s.config, replication);
}

}  // namespace

TEST(Engine, KinematicsMatchRelaxationOracle) {
  const Scenario s = scenario(corridor_doc());
  const RunLogs logs = run_one(s);
  ASSERT_EQ(logs.metrics.size(), 1u);
  ASSERT_TRUE(logs.metrics[0].completed);
  const double v0 = s.config.social_force.desired_speed;
  const double tau = s.config.social_force.relaxation_time;
  const double expected = (10.0 - 0.3) / v0 + tau;
  EXPECT_NEAR(logs.metrics[0].travel_time, expected, 0.10 * expected);
  EXPECT_NEAR(logs.metrics[0].travel_time, 10.0 / 1.34 + 0.5, 0.10 * 7.96);
  EXPECT_NEAR(logs.metrics[0].path_length, 9.7, 0.3);
}

TEST(Engine, SpawnInsideArrivalRadiusCompletesImmediately) {
  json doc = corridor_doc();
  doc["goal_points"][0]["position"] = {12, 5};
  doc["task"]["legs"][0]["arrival_radius"] = 1.0;
  const RunLogs logs = run_one(scenario(doc));
  ASSERT_EQ(logs.trajectory.size(), 1u);
  EXPECT_EQ(logs.trajectory[0].mode, NavMode::arrived);
  EXPECT_EQ(logs.trajectory[0].t, 0.0);
  ASSERT_EQ(logs.metrics.size(), 1u);
  EXPECT_TRUE(logs.metrics[0].completed);
  EXPECT_EQ(logs.metrics[0].travel_time, 0.0);
  // The first perception tick logged the at-target sign.
  ASSERT_FALSE(logs.sign_events.empty());
  EXPECT_EQ(logs.sign_events[0].t, 0.0);
}

TEST(Engine, SameSeedIsIdentical) {
  json doc = corridor_doc();
  doc["config"]["agents_per_replication"] = 4;
  const Scenario s = scenario(doc);
  const RunLogs a = run_one(s, 2);
  const RunLogs b = run_one(s, 2);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    ASSERT_EQ(a.trajectory[i].x, b.trajectory[i].x);
    ASSERT_EQ(a.trajectory[i].y, b.trajectory[i].y);
    ASSERT_EQ(a.trajectory[i].mode, b.trajectory[i].mode);
  }
  ASSERT_EQ(a.sign_events.size(), b.sign_events.size());
  for (std::size_t i = 0; i < a.sign_events.size(); ++i) {
    ASSERT_EQ(a.sign_events[i].attention, b.sign_events[i].attention);
    ASSERT_EQ(a.sign_events[i].threshold, b.sign_events[i].threshold);
  }
  EXPECT_EQ(a.notes, b.notes);
}

TEST(Engine, OneRowPerActiveAgentPerTick) {
  json doc = corridor_doc();
  doc["config"]["agents_per_replication"] = 3;
  const Scenario s = scenario(doc);
  const RunLogs logs = run_one(s);
  std::map<AgentId, std::vector<double>> times;
  for (const auto& r : logs.trajectory) times[r.agent].push_back(r.t);
  ASSERT_EQ(times.size(), 3u);
  for (const auto& [agent, ts] : times) {
    for (std::size_t k = 0; k < ts.size(); ++k) ASSERT_NEAR(ts[k], k * s.config.dt, 1e-9) << agent;
  }
  for (const auto& r : logs.trajectory) EXPECT_EQ(r.floor, "hall");
}

TEST(Engine, TimeoutAfterOneTickGivesTwoRows) {
  json doc = corridor_doc();
  doc["config"]["leg_timeout"] = 0.05;
  const RunLogs logs = run_one(scenario(doc));
  ASSERT_EQ(logs.trajectory.size(), 2u);
  EXPECT_EQ(logs.trajectory[1].mode, NavMode::timed_out);
  ASSERT_EQ(logs.notes.size(), 1u);
  EXPECT_NE(logs.notes[0].find("timed out"), std::string::npos);
  EXPECT_FALSE(logs.metrics[0].completed);
}

TEST(Engine, PerceptionFollowsItsInterval) {
  json doc = corridor_doc();
  doc["config"]["perception_interval"] = 0.25;
  const Scenario s = scenario(doc);
  EXPECT_EQ(s.config.perception_every(), 5);
  const RunLogs logs = run_one(s);
  std::set<long> ticks;
  for (const auto& e : logs.sign_events) {
    const double k = e.t / s.config.dt;
    ASSERT_NEAR(k, std::round(k), 1e-6);
    EXPECT_EQ(std::lround(k) % 5, 0);
    ticks.insert(std::lround(k));
  }
  const long total_ticks = static_cast<long>(logs.trajectory.size());
  EXPECT_EQ(static_cast<long>(ticks.size()), (total_ticks - 1) / 5 + 1);
}

TEST(Engine, ObserverSeesEveryFrame) {
  const Scenario s = scenario(corridor_doc());
  int frames = 0;
  const RunLogs logs = run_replication(s.environment, s.task, s.config, 0, [&](const PerceptionFrame& f) {
    ++frames;
    EXPECT_EQ(f.fused.rows(), s.config.camera.raster_height);
    EXPECT_LE(f.fused.maxCoeff(), 1.0);
  });
  std::set<double> times;
  for (const auto& e : logs.sign_events) times.insert(e.t);
  EXPECT_EQ(frames, static_cast<int>(times.size()));
}

TEST(LegMetrics, FromSyntheticRows) {
  auto row = [](double t, double x, int leg, NavMode mode, std::string floor = "a") {
    TrajectoryRow r;
    r.t = t;
    r.x = x;
    r.leg = leg;
    r.mode = mode;
    r.floor = std::move(floor);
    return r;
  };
  const std::vector<TrajectoryRow> rows{
      row(0, 0, 1, NavMode::exploring),      row(1, 1, 1, NavMode::exploring), row(2, 3, 1, NavMode::arrived),
      row(3, 4, 2, NavMode::following_clue), row(4, 9, 2, NavMode::exploring, "b"),
      row(5, 10, 2, NavMode::timed_out, "b")};
  const auto m = leg_metrics(rows);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_TRUE(m[0].completed);
  EXPECT_DOUBLE_EQ(m[0].travel_time, 2.0);
  EXPECT_DOUBLE_EQ(m[0].path_length, 3.0);
  EXPECT_FALSE(m[1].completed);
  EXPECT_DOUBLE_EQ(m[1].travel_time, 3.0);
  EXPECT_DOUBLE_EQ(m[1].path_length, 1.0);  // the floor change is not walking distance
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({}, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.9), 9.0);
}

TEST(Batch, SingleReplicationAggregateEqualsItsMetrics) {
  json doc = corridor_doc();
  doc["config"]["agents_per_replication"] = 2;
  const Scenario s = scenario(doc);
  const BatchResult b = run_batch(s.environment, s.task, s.config, {{}, 1, {}});
  ASSERT_EQ(b.runs.size(), 1u);
  ASSERT_EQ(b.legs.size(), 1u);
  std::vector<double> times;
  for (const auto& m : b.runs[0].metrics) times.push_back(m.travel_time);
  EXPECT_EQ(b.legs[0].attempted, 2);
  EXPECT_EQ(b.legs[0].completed, 2);
  EXPECT_DOUBLE_EQ(b.legs[0].travel_time_median, percentile(times, 0.5));
  EXPECT_EQ(b.agent_runs, 2);
  EXPECT_EQ(b.all_legs_completed, 2);
}

TEST(Batch, ExecutionOrderAndThreadsDoNotMatter) {
  json doc = corridor_doc();
  doc["config"]["replications"] = 3;
  doc["config"]["agents_per_replication"] = 2;
  const Scenario s = scenario(doc);
  const BatchResult forward = run_batch(s.environment, s.task, s.config, {{0, 1, 2}, 1, {}});
  const BatchResult backward = run_batch(s.environment, s.task, s.config, {{2, 0, 1}, 2, {}});
  ASSERT_EQ(forward.runs.size(), backward.runs.size());
  for (std::size_t r = 0; r < forward.runs.size(); ++r) {
    EXPECT_EQ(forward.runs[r].replication, static_cast<int>(r));
    ASSERT_EQ(forward.runs[r].trajectory.size(), backward.runs[r].trajectory.size());
    for (std::size_t i = 0; i < forward.runs[r].trajectory.size(); ++i) {
      ASSERT_EQ(forward.runs[r].trajectory[i].x, backward.runs[r].trajectory[i].x);
    }
  }
  EXPECT_EQ(forward.legs[0].travel_time_median, backward.legs[0].travel_time_median);
}

TEST(Batch, CompletionRatesAgreeAcrossReplications) {
  // Far hall with a modest sign and no base point on the target: completion depends on the
  // random thresholds, so replications differ only by binomial noise.
  json doc = corridor_doc();
  doc["floors"][0]["outline"] = {{0, 0}, {40, 0}, {40, 10}, {0, 10}};
  doc["signs"][0]["center"] = {39.95, 5, 1.8};
  doc["signs"][0]["width"] = 1.2;
  doc["signs"][0]["height"] = 0.6;
  doc["base_points"][0]["position"] = {2, 9};
  doc["task"]["legs"][0]["target"]["point"] = {38, 5};
  doc["task"]["legs"][0]["arrival_radius"] = 1.5;
  doc["config"]["leg_timeout"] = 40;
  doc["config"]["replications"] = 4;
  doc["config"]["agents_per_replication"] = 10;
  const Scenario s = scenario(doc);
  const BatchResult b = run_batch(s.environment, s.task, s.config);
  std::vector<double> rates;
  int total = 0;
  for (const auto& run : b.runs) {
    int done = 0;
    for (const auto& m : run.metrics) done += m.completed ? 1 : 0;
    rates.push_back(done / 10.0);
    total += done;
  }
  const double p = total / 40.0;
  const double sigma = std::sqrt(std::max(p * (1 - p), 1.0 / 40) / 10.0);
  for (double r : rates) EXPECT_LE(std::abs(r - p), 3.5 * sigma + 1e-12) << "pooled " << p;
}

TEST(Batch, AuditCoversEverySign) {
  json doc = corridor_doc();
  doc["signs"].push_back({{"id", 2}, {"floor", "hall"}, {"center", {0.05, 5, 1.8}}, {"facing_deg", 0},
                          {"width", 1}, {"height", 0.5}, {"face_color", {1, 0, 0}},
                          {"object_class", "schedule"}, {"entries", json::array()}});
  const Scenario s = scenario(doc);
  const BatchResult b = run_batch(s.environment, s.task, s.config);
  ASSERT_EQ(b.audit.size(), 2u);
  EXPECT_EQ(b.audit[1].sign, 2u);
  EXPECT_EQ(b.audit[1].seen_fraction, 0.0);  // behind the agent the whole time
  EXPECT_GT(b.audit[0].mean_attention_when_visible, 0.0);
}
