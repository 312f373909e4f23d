#include <gtest/gtest.h>

#include <cmath>

#include "hrisk/errors.hpp"
#include "hrisk/scenario.hpp"
#include "oracles.hpp"

using namespace hrisk;

namespace {

ScenarioConfig corridor() {
  ScenarioConfig c;
  c.kind = ScenarioKind::kApproach;
  c.timestep_T = 0.05;
  c.horizon_K = 200;
  c.d_threshold = 0.5;
  c.human_speed_vH = 0.8;
  c.robot_speed = 1.0;
  c.geometry.initial_separation = 3.0;
  return c;
}

}  // namespace

TEST(Scenario, CollisionForceAndSeverity) {
  EXPECT_DOUBLE_EQ(collision_force(1.0, 10.0, 25000.0), 500.0);
  EXPECT_DOUBLE_EQ(collision_force(2.0, 4.0, 9.0), 12.0);
  EXPECT_EQ(severity(300.0, 140.0, false), 0.0);
  EXPECT_DOUBLE_EQ(severity(280.0, 140.0, true), 2.0);
}

TEST(Scenario, CorridorMatchesClosedFormOracle) {
  const ScenarioConfig cfg = corridor();
  RandomStream s(17, {});
  for (int trial = 0; trial < 200; ++trial) {
    const double offset = 0.3 * s.uniform();
    for (int n = 0; n <= 12; ++n) {
      const TrialOutcome out = run_trial_with_offset(cfg, {n, 0.0, 0.0}, offset);
      const oracle::CorridorCase oc{3.0 + offset, 0.5, 0.8, 1.0, 0.05, n, cfg.horizon_K};
      ASSERT_EQ(out.collided, oracle::corridor_collides(oc)) << "offset " << offset << " N " << n;
    }
  }
}

TEST(Scenario, CorridorFirstTriggerAndEffectiveStep) {
  const ScenarioConfig cfg = corridor();
  const TrialOutcome out = run_trial_with_offset(cfg, {3, 0.0, 0.0}, 0.01);
  // d_k = 3.01 - 0.09 k drops below 0.5 first at k = 28.
  ASSERT_TRUE(out.reaction_triggered_step.has_value());
  EXPECT_EQ(*out.reaction_triggered_step, 28);
  EXPECT_EQ(*out.reaction_effective_step, 31);
  EXPECT_FALSE(out.collided);
  EXPECT_TRUE(out.below_threshold);
  EXPECT_NEAR(out.min_true_distance, 3.01 - 31 * 0.09, 1e-9);
}

TEST(Scenario, CorridorImpactSpeedIsClosingSpeed) {
  const ScenarioConfig cfg = corridor();
  const TrialOutcome out = run_trial_with_offset(cfg, {9, 0.0, 0.0}, 0.0);
  ASSERT_TRUE(out.collided);
  ASSERT_TRUE(out.impact_speed.has_value());
  EXPECT_NEAR(*out.impact_speed, 1.8, 1e-9);
  EXPECT_NEAR(out.collision_force_Fc, 1.8 * 500.0, 1e-6);
  EXPECT_NEAR(out.severity, 1.8 * 500.0 / 140.0, 1e-9);
  EXPECT_NEAR(*out.collision_step * 0.09, 3.0, 0.09);
}

TEST(Scenario, ContactAtStartUsesNominalRelativeSpeed) {
  ScenarioConfig cfg = corridor();
  cfg.geometry.initial_separation = 0.0;
  const TrialOutcome out = run_trial_with_offset(cfg, {0, 0.0, 0.0}, 0.0);
  ASSERT_TRUE(out.collided);
  EXPECT_EQ(*out.collision_step, 0);
  EXPECT_NEAR(*out.impact_speed, 1.8, 1e-9);
}

TEST(Scenario, LargerMeasuredDistanceNeverHelps) {
  const ScenarioConfig cfg = corridor();
  for (int n = 0; n <= 9; ++n) {
    bool previous = false;
    for (double u_s = -0.3; u_s <= 0.3 + 1e-12; u_s += 0.01) {
      const bool hit = run_trial_with_offset(cfg, {n, u_s, 0.0}, 0.02).collided;
      ASSERT_TRUE(!previous || hit) << "N " << n << " u_s " << u_s;
      previous = hit;
    }
  }
}

TEST(Scenario, RunTrialTakesOneJitterDraw) {
  ScenarioConfig cfg = corridor();
  cfg.geometry.start_jitter = 0.2;
  const RandomStream stream(3, {1, 2});
  RandomStream copy = stream;
  const double offset = 0.2 * copy.uniform();
  const TrialOutcome a = run_trial(cfg, {5, 0.0, 0.0}, stream);
  const TrialOutcome b = run_trial_with_offset(cfg, {5, 0.0, 0.0}, offset);
  EXPECT_EQ(a.collided, b.collided);
  EXPECT_EQ(a.min_true_distance, b.min_true_distance);
  EXPECT_EQ(a.reaction_triggered_step, b.reaction_triggered_step);
}

TEST(Scenario, SharedReachAndMobileStopCanCollide) {
  ScenarioConfig b;
  b.kind = ScenarioKind::kSharedReach;
  b.d_threshold = 0.45;
  b.geometry.contact_radius = 0.2;
  EXPECT_TRUE(nominal_paths_approach(b));
  EXPECT_FALSE(run_trial_with_offset(b, {0, 0.0, 0.0}, 0.0).collided);
  EXPECT_TRUE(run_trial_with_offset(b, {40, 0.0, 0.0}, 0.0).collided);

  ScenarioConfig c;
  c.kind = ScenarioKind::kMobileStop;
  c.d_threshold = 0.8;
  c.human_speed_vH = 1.0;
  c.geometry.initial_separation = 1.5;
  c.geometry.crossing_offset = 1.5;
  c.geometry.contact_radius = 0.3;
  EXPECT_TRUE(nominal_paths_approach(c));
  EXPECT_FALSE(run_trial_with_offset(c, {0, 0.0, 0.0}, 0.0).collided);
}

TEST(Scenario, MobileStopRobotHaltsAfterReaction) {
  ScenarioConfig c;
  c.kind = ScenarioKind::kMobileStop;
  c.d_threshold = 10.0;  // triggers at step 0
  ReactionSchedule r{2, std::nullopt, std::nullopt};
  AgentState s = initial_state(c, 0.0);
  s = step(s, c, true_distance(c, s), r);
  s = step(s, c, true_distance(c, s), r);
  const double x_at_2 = s.robot.x;
  EXPECT_NEAR(x_at_2, 2 * c.robot_speed * c.timestep_T, 1e-12);
  s = step(s, c, true_distance(c, s), r);
  EXPECT_EQ(s.robot.x, x_at_2);
  EXPECT_EQ(*r.triggered_step, 0);
  EXPECT_EQ(*r.effective_step, 2);
}

TEST(Scenario, DegenerateGeometryIsFlagged) {
  ScenarioConfig cfg = corridor();
  cfg.human_speed_vH = 0.0;
  cfg.robot_speed = 0.0;
  EXPECT_FALSE(nominal_paths_approach(cfg));
  EXPECT_TRUE(nominal_paths_approach(corridor()));
}

TEST(Scenario, DangerPredicates) {
  ScenarioConfig cfg = corridor();
  const TrialOutcome near_miss = run_trial_with_offset(cfg, {0, 0.0, 0.0}, 0.0);
  EXPECT_FALSE(is_dangerous(cfg, near_miss));
  cfg.danger = DangerPredicate::kBelowThreshold;
  EXPECT_TRUE(is_dangerous(cfg, near_miss));
}

TEST(Scenario, ValidationAndNames) {
  ScenarioConfig cfg = corridor();
  cfg.timestep_T = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = corridor();
  cfg.horizon_K = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(scenario_kind_from_string("B"), ScenarioKind::kSharedReach);
  EXPECT_EQ(scenario_kind_from_string(to_string(ScenarioKind::kMobileStop)), ScenarioKind::kMobileStop);
  EXPECT_THROW(scenario_kind_from_string("D"), ConfigError);
  EXPECT_EQ(danger_predicate_from_string("below_threshold"), DangerPredicate::kBelowThreshold);
}
