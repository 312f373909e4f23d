#pragma once

#include <optional>
#include <string_view>

#include "hrisk/random_stream.hpp"

namespace hrisk {

/// A: human walks down a corridor toward a robot that advances to meet it;
///    the reaction is a retreat at robot_speed.
/// B: human and robot reach for the same object along perpendicular paths
///    and both stop there; the reaction reverses the robot.
/// C: a mobile robot drives toward the line a human is crossing;
///    the reaction is a full stop.
enum class ScenarioKind { kApproach, kSharedReach, kMobileStop };

/// Which trial property counts as a dangerous event for estimation.
enum class DangerPredicate { kCollision, kBelowThreshold };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view s);
std::string_view to_string(DangerPredicate p);
DangerPredicate danger_predicate_from_string(std::string_view s);

struct ScenarioGeometry {
  double initial_separation = 3.0;  // A: initial true distance. C: robot travel to the crossing line. (m)
  double crossing_offset = 1.5;     // C: human start distance from the robot's path (m)
  double human_path_length = 1.2;   // B: human start distance from the object (m)
  double robot_path_length = 1.0;   // B: robot start distance from the object (m)
  double contact_radius = 0.0;      // folded body radii; contact when centre distance <= this (m)
  double start_jitter = 0.0;        // human start offset ~ U[0, start_jitter] per trial (m)

  friend bool operator==(const ScenarioGeometry&, const ScenarioGeometry&) = default;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kApproach;
  double timestep_T = 0.05;        // s
  int horizon_K = 400;             // steps
  double d_threshold = 0.5;        // m, reaction trigger: measured < d_threshold
  double human_speed_vH = 0.8;     // m/s
  double robot_speed = 1.0;        // m/s
  ScenarioGeometry geometry;
  double contact_stiffness_k = 25000.0;  // N/m
  double effective_mass_mu = 10.0;       // kg
  double F_max = 140.0;                  // N, placeholder body-region limit
  DangerPredicate danger = DangerPredicate::kCollision;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// False when the nominal trajectories (no reaction, exact measurements,
/// no jitter) never come into contact within the horizon: such a scenario
/// cannot produce a dangerous event and is flagged as degenerate.
bool nominal_paths_approach(const ScenarioConfig& config);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct AgentState {
  int k = 0;
  Vec2 human;
  Vec2 robot;
};

/// Pending safety reaction. The first trigger wins; a reaction triggered at
/// step j with delay N is in effect from step j + N on.
struct ReactionSchedule {
  int delay_steps = 0;
  std::optional<int> triggered_step;
  std::optional<int> effective_step;

  [[nodiscard]] bool in_effect(int k) const { return effective_step && k >= *effective_step; }
};

struct TrialParams {
  int delay_steps = 0;    // N
  double delta_d0 = 0.0;  // m
  double c = 0.0;         // s
};

struct TrialOutcome {
  TrialParams params;
  bool collided = false;
  std::optional<int> collision_step;
  std::optional<double> impact_speed;  // m/s
  double collision_force_Fc = 0.0;     // N
  double severity = 0.0;
  double min_true_distance = 0.0;  // m
  bool below_threshold = false;    // true distance fell below d_threshold
  std::optional<int> reaction_triggered_step;
  std::optional<int> reaction_effective_step;
};

AgentState initial_state(const ScenarioConfig& config, double start_offset);

/// Ground-truth surface distance d_HR (centre distance minus contact radius).
/// Signed along the corridor for kind A.
double true_distance(const ScenarioConfig& config, const AgentState& state);

/// Advances both agents by one timestep. May arm `reactions` when the
/// measured distance is below the threshold.
AgentState step(const AgentState& state, const ScenarioConfig& config, double measured_distance,
                ReactionSchedule& reactions);

/// One simulated trial. Consumes exactly one draw from `stream` (start jitter).
TrialOutcome run_trial(const ScenarioConfig& config, const TrialParams& params, RandomStream stream);

/// Same as run_trial with an explicit human start offset instead of a draw.
TrialOutcome run_trial_with_offset(const ScenarioConfig& config, const TrialParams& params,
                                   double start_offset);

/// Transient-contact estimate F_c = v * sqrt(k * mu).
double collision_force(double impact_speed, double effective_mass_mu, double contact_stiffness_k);

/// 0 without collision, F_c / F_max otherwise (not clipped).
double severity(double collision_force_Fc, double F_max, bool collided);

bool is_dangerous(const ScenarioConfig& config, const TrialOutcome& outcome);

}  // namespace hrisk
