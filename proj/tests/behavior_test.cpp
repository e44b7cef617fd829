#include "fixtures.hpp"

#include "wayfind/behavior.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace wayfind;
using namespace wayfind::testing;

namespace {

Leg wc_leg() {
  Leg leg;
  leg.target_label = "WC";
  leg.target = {"f", Vec2(9, 9)};
  return leg;
}

Environment signed_room() {
  Environment env = room(20, 20,
                         {make_sign(1, "f", Vec3(5, 5, 2), Vec2(-1, 0), 1, 0.5, ObjectClass::signage, {at_target("WC")}),
                          make_sign(2, "f", Vec3(5, 7, 2), Vec2(-1, 0), 1, 0.5, ObjectClass::signage,
                                    {direct_to("WC", "gp_7")}),
                          make_sign(3, "f", Vec3(5, 9, 2), Vec2(-1, 0), 1, 0.5, ObjectClass::signage,
                                    {direct_to("Platform 12", "gp_7")}),
                          make_sign(4, "f", Vec3(5, 11, 2), Vec2(-1, 0), 1, 0.5, ObjectClass::signage,
                                    {direct_to("wc", "gp_8")})});
  env.goal_points = {{"gp_7", "f", Vec2(12, 3), 0.0}, {"gp_8", "f", Vec2(3, 12), 0.0}};
  env.build_index();
  return env;
}

Candidate candidate(SignId id, SignCategory cat, double attention, std::string goal = "gp_7") {
  Candidate c;
  c.sign = id;
  c.category = cat;
  c.attention = attention;
  c.threshold = 0.0;
  c.clue_goal = cat == SignCategory::directional_clue ? std::move(goal) : "";
  return c;
}

}  // namespace

TEST(Thresholds, SameSeedSameTable) {
  const std::vector<AgentId> agents{0, 1, 2, 3};
  const std::vector<SignId> signs{1, 5, 9};
  const auto a = ThresholdTable::draw(agents, signs, 42, 3);
  const auto b = ThresholdTable::draw(agents, signs, 42, 3);
  EXPECT_EQ(a.size(), 12u);
  for (auto ag : agents) {
    for (auto s : signs) EXPECT_EQ(a.at(ag, s), b.at(ag, s));
  }
  EXPECT_THROW(a.at(7, 1), std::out_of_range);
}

TEST(Thresholds, DrawIsAPureFunctionOfItsKeys) {
  // The value does not depend on which other pairs were drawn, or when.
  const double early = threshold_draw(42, 3, 2, 5);
  const auto table = ThresholdTable::draw(std::vector<AgentId>{2}, std::vector<SignId>{5}, 42, 3);
  for (int tick = 0; tick < 1000; ++tick) ASSERT_EQ(table.at(2, 5), early);
  EXPECT_NE(threshold_draw(42, 3, 2, 5), threshold_draw(42, 4, 2, 5));
  EXPECT_NE(threshold_draw(42, 3, 2, 5), threshold_draw(43, 3, 2, 5));
}

TEST(Thresholds, UniformMeanAndRange) {
  double sum = 0.0;
  for (AgentId a = 0; a < 10000; ++a) {
    const double t = threshold_draw(7, 0, a, 1);
    ASSERT_GE(t, 0.0);
    ASSERT_LT(t, 1.0);
    sum += t;
  }
  const double mean = sum / 10000;
  EXPECT_GE(mean, 0.485);
  EXPECT_LE(mean, 0.515);
}

TEST(Categorize, AtTargetDirectionalAndIrrelevant) {
  const Environment env = signed_room();
  const Leg leg = wc_leg();
  EXPECT_EQ(categorize_sign(env.sign(1), leg), SignCategory::at_target);
  EXPECT_EQ(categorize_sign(env.sign(2), leg), SignCategory::directional_clue);
  EXPECT_EQ(categorize_sign(env.sign(3), leg), SignCategory::irrelevant);
  EXPECT_EQ(categorize_sign(env.sign(4), leg), SignCategory::directional_clue);
}

TEST(Classify, ThresholdGatesRecognition) {
  const Environment env = signed_room();
  ThresholdTable t;
  t.set(0, 2, 0.8);
  t.set(0, 1, 0.2);
  const std::vector<SignScore> scores{{2, 0, 0.3, 10}, {1, 0, 0.2, 10}};
  const auto c = classify(scores, t, 0, wc_leg(), env);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_FALSE(c[0].seen);  // 0.3 < 0.8
  EXPECT_TRUE(c[1].seen);   // 0.2 >= 0.2
  EXPECT_EQ(c[0].clue_goal, "gp_7");
}

TEST(Decide, CategoryOneBeatsStrongerClue) {
  const Environment env = signed_room();
  const std::vector<Candidate> s{candidate(2, SignCategory::directional_clue, 0.9),
                                 candidate(1, SignCategory::at_target, 0.4)};
  const Decision d = decide(s, wc_leg(), NavState{}, env);
  ASSERT_TRUE(d.chosen_sign);
  EXPECT_EQ(*d.chosen_sign, 1u);
  EXPECT_EQ(d.mode, NavMode::target_known);
  ASSERT_TRUE(d.goal);
  EXPECT_EQ(d.goal->point, wc_leg().target.point);
}

TEST(Decide, HigherAttentionWinsWithinCategory) {
  const Environment env = signed_room();
  const std::vector<Candidate> s{candidate(2, SignCategory::directional_clue, 0.6, "gp_7"),
                                 candidate(4, SignCategory::directional_clue, 0.8, "gp_8")};
  const Decision d = decide(s, wc_leg(), NavState{}, env);
  ASSERT_TRUE(d.chosen_sign);
  EXPECT_EQ(*d.chosen_sign, 4u);
  EXPECT_EQ(d.clue_goal, "gp_8");
  EXPECT_EQ(d.goal->point, Vec2(3, 12));
}

TEST(Decide, UnseenSignsAreIgnored) {
  const Environment env = signed_room();
  Candidate c = candidate(1, SignCategory::at_target, 0.3);
  c.threshold = 0.8;
  const Decision d = decide(std::vector<Candidate>{c}, wc_leg(), NavState{}, env);
  EXPECT_FALSE(d.chosen_sign);
  EXPECT_EQ(d.mode, NavMode::exploring);
  EXPECT_FALSE(d.goal);
}

TEST(Decide, ModesOnlyUpgrade) {
  const Environment env = signed_room();
  NavState state;
  state.mode = NavMode::target_known;
  const Decision d = decide(std::vector<Candidate>{candidate(2, SignCategory::directional_clue, 0.9)},
                            wc_leg(), state, env);
  EXPECT_EQ(d.mode, NavMode::target_known);
  EXPECT_FALSE(d.goal_changed);
}

TEST(Decide, ActiveClueIsKeptUntilReached) {
  const Environment env = signed_room();
  NavState state;
  state.mode = NavMode::following_clue;
  state.clue_goal = "gp_7";
  state.clue_active = true;
  const Decision d = decide(std::vector<Candidate>{candidate(4, SignCategory::directional_clue, 0.99, "gp_8")},
                            wc_leg(), state, env);
  EXPECT_FALSE(d.goal_changed);
  EXPECT_EQ(d.clue_goal, "gp_7");
  state.clue_active = false;
  state.reached_clue_goals.insert("gp_7");
  const Decision e = decide(std::vector<Candidate>{candidate(4, SignCategory::directional_clue, 0.99, "gp_8")},
                            wc_leg(), state, env);
  EXPECT_TRUE(e.goal_changed);
  EXPECT_EQ(e.clue_goal, "gp_8");
}

TEST(Decide, ReachedClueGoalIsNotFollowedAgain) {
  const Environment env = signed_room();
  NavState state;
  state.reached_clue_goals.insert("gp_7");
  const Decision d = decide(std::vector<Candidate>{candidate(2, SignCategory::directional_clue, 0.9)},
                            wc_leg(), state, env);
  EXPECT_FALSE(d.chosen_sign);
}

TEST(ApplyDecision, UpdatesState) {
  const Environment env = signed_room();
  NavState state;
  apply_decision(decide(std::vector<Candidate>{candidate(2, SignCategory::directional_clue, 0.9)}, wc_leg(), state,
                        env),
                 state);
  EXPECT_EQ(state.mode, NavMode::following_clue);
  EXPECT_TRUE(state.clue_active);
  EXPECT_EQ(state.clue_goal, "gp_7");
}

TEST(Exploration, NearestVisitedAndReset) {
  const std::vector<NamedPoint> points{{"far", "f", Vec2(50, 0), 0}, {"near", "f", Vec2(5, 0), 0},
                                      {"mid", "f", Vec2(20, 0), 0}};
  const PathLengthFn euclid = [](const NamedPoint& p) { return p.position.norm(); };
  NavState state;
  EXPECT_EQ(next_exploration_goal(state, points, euclid)->id, "near");
  state.visited_base_points.insert("near");
  EXPECT_EQ(next_exploration_goal(state, points, euclid)->id, "mid");
  state.visited_base_points = {"near", "mid", "far"};
  EXPECT_EQ(next_exploration_goal(state, points, euclid)->id, "near");
  EXPECT_TRUE(state.visited_base_points.empty());
}

TEST(Exploration, TiesGoToDeclarationOrderAndUnreachableIsEmpty) {
  const std::vector<NamedPoint> points{{"a", "f", Vec2(0, 5), 0}, {"b", "f", Vec2(5, 0), 0}};
  NavState state;
  EXPECT_EQ(next_exploration_goal(state, points, [](const NamedPoint& p) { return p.position.norm(); })->id, "a");
  const auto none = next_exploration_goal(state, points, [](const NamedPoint&) {
    return std::numeric_limits<double>::infinity();
  });
  EXPECT_FALSE(none);
  EXPECT_THROW(next_exploration_goal(state, std::vector<NamedPoint>{}, [](const NamedPoint&) { return 0.0; }),
               std::invalid_argument);
}

TEST(Exploration, LowerBoundOnlyPrunes) {
  std::vector<NamedPoint> points;
  for (int i = 0; i < 12; ++i) points.push_back({"p" + std::to_string(i), "f", Vec2(3.0 * ((i * 7) % 12), 1.0), 0});
  // A detour factor makes the true length exceed the straight-line bound.
  const PathLengthFn length = [](const NamedPoint& p) { return 1.3 * p.position.norm() + std::fmod(p.position.x(), 4.0); };
  int evaluations = 0;
  const PathLengthFn counted = [&](const NamedPoint& p) { ++evaluations; return length(p); };
  const PathLengthFn bound = [](const NamedPoint& p) { return p.position.norm(); };
  NavState a, b;
  const auto plain = next_exploration_goal(a, points, length);
  const auto pruned = next_exploration_goal(b, points, counted, bound);
  EXPECT_EQ(plain->id, pruned->id);
  EXPECT_LT(evaluations, 12);
}
