#include "hrisk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrisk/errors.hpp"
#include "hrisk/uncertainty.hpp"

namespace hrisk {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kApproach: return "approach";
    case ScenarioKind::kSharedReach: return "shared_reach";
    case ScenarioKind::kMobileStop: return "mobile_stop";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(std::string_view s) {
  if (s == "approach" || s == "A") return ScenarioKind::kApproach;
  if (s == "shared_reach" || s == "B") return ScenarioKind::kSharedReach;
  if (s == "mobile_stop" || s == "C") return ScenarioKind::kMobileStop;
  throw ConfigError("unknown scenario kind '" + std::string(s) +
                    "' (expected approach, shared_reach or mobile_stop)");
}

std::string_view to_string(DangerPredicate p) {
  return p == DangerPredicate::kCollision ? "collision" : "below_threshold";
}

DangerPredicate danger_predicate_from_string(std::string_view s) {
  if (s == "collision") return DangerPredicate::kCollision;
  if (s == "below_threshold") return DangerPredicate::kBelowThreshold;
  throw ConfigError("unknown danger predicate '" + std::string(s) +
                    "' (expected collision or below_threshold)");
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void ScenarioConfig::validate() const {
  require(std::isfinite(timestep_T) && timestep_T > 0.0, "scenario.timestep_T must be > 0");
  require(horizon_K >= 1, "scenario.horizon_K must be >= 1");
  require(std::isfinite(d_threshold) && d_threshold > 0.0, "scenario.d_threshold must be > 0");
  require(std::isfinite(F_max) && F_max > 0.0, "scenario.F_max must be > 0");
  require(finite_nonneg(human_speed_vH), "scenario.human_speed_vH must be >= 0");
  require(finite_nonneg(robot_speed), "scenario.robot_speed must be >= 0");
  require(finite_nonneg(contact_stiffness_k), "scenario.contact_stiffness_k must be >= 0");
  require(finite_nonneg(effective_mass_mu), "scenario.effective_mass_mu must be >= 0");
  const auto& g = geometry;
  require(finite_nonneg(g.initial_separation), "geometry.initial_separation must be >= 0");
  require(finite_nonneg(g.crossing_offset), "geometry.crossing_offset must be >= 0");
  require(finite_nonneg(g.human_path_length), "geometry.human_path_length must be >= 0");
  require(finite_nonneg(g.robot_path_length), "geometry.robot_path_length must be >= 0");
  require(finite_nonneg(g.contact_radius), "geometry.contact_radius must be >= 0");
  require(finite_nonneg(g.start_jitter), "geometry.start_jitter must be >= 0");
}

AgentState initial_state(const ScenarioConfig& config, double start_offset) {
  const auto& g = config.geometry;
  AgentState s;
  switch (config.kind) {
    case ScenarioKind::kApproach:
      s.robot = {0.0, 0.0};
      s.human = {g.initial_separation + g.contact_radius + start_offset, 0.0};
      break;
    case ScenarioKind::kSharedReach:
      s.human = {-(g.human_path_length + start_offset), 0.0};
      s.robot = {0.0, g.robot_path_length};
      break;
    case ScenarioKind::kMobileStop:
      s.robot = {0.0, 0.0};
      s.human = {g.initial_separation, g.crossing_offset + start_offset};
      break;
  }
  return s;
}

double true_distance(const ScenarioConfig& config, const AgentState& state) {
  const double radius = config.geometry.contact_radius;
  if (config.kind == ScenarioKind::kApproach) {
    return state.human.x - state.robot.x - radius;
  }
  return std::hypot(state.human.x - state.robot.x, state.human.y - state.robot.y) - radius;
}

AgentState step(const AgentState& state, const ScenarioConfig& config, double measured_distance,
                ReactionSchedule& reactions) {
  if (!reactions.triggered_step && measured_distance < config.d_threshold) {
    reactions.triggered_step = state.k;
    reactions.effective_step = state.k + reactions.delay_steps;
  }
  const bool reacting = reactions.in_effect(state.k);
  const double human_step = config.human_speed_vH * config.timestep_T;
  const double robot_step = config.robot_speed * config.timestep_T;

  AgentState next = state;
  next.k = state.k + 1;
  switch (config.kind) {
    case ScenarioKind::kApproach:
      next.human.x -= human_step;
      next.robot.x += reacting ? -robot_step : robot_step;
      break;
    case ScenarioKind::kSharedReach:
      next.human.x = std::min(state.human.x + human_step, 0.0);
      next.robot.y = reacting ? state.robot.y + robot_step : std::max(state.robot.y - robot_step, 0.0);
      break;
    case ScenarioKind::kMobileStop:
      next.human.y -= human_step;
      if (!reacting) next.robot.x += robot_step;
      break;
  }
  return next;
}

double collision_force(double impact_speed, double effective_mass_mu, double contact_stiffness_k) {
  return impact_speed * std::sqrt(contact_stiffness_k * effective_mass_mu);
}

double severity(double collision_force_Fc, double F_max, bool collided) {
  return collided ? collision_force_Fc / F_max : 0.0;
}

TrialOutcome run_trial_with_offset(const ScenarioConfig& config, const TrialParams& params,
                                   double start_offset) {
  TrialOutcome out;
  out.params = params;
  const double u_s = spatial_deviation(params.delta_d0, params.c, config.human_speed_vH);
  ReactionSchedule reactions{params.delay_steps, std::nullopt, std::nullopt};

  AgentState state = initial_state(config, start_offset);
  double d = true_distance(config, state);
  out.min_true_distance = d;
  for (int k = 0;; ++k) {
    out.min_true_distance = std::min(out.min_true_distance, d);
    if (d < config.d_threshold) out.below_threshold = true;
    if (d <= 0.0) {
      out.collided = true;
      out.collision_step = k;
      break;
    }
    if (k == config.horizon_K) break;
    const AgentState next = step(state, config, perturb_distance(d, u_s), reactions);
    const double next_d = true_distance(config, next);
    if (next_d <= 0.0) {
      out.impact_speed = (d - next_d) / config.timestep_T;
    }
    state = next;
    d = next_d;
  }

  if (out.collided && !out.impact_speed) {
    // Contact at the initial state: relative speed of the nominal first move.
    ReactionSchedule none{config.horizon_K + 1, std::nullopt, std::nullopt};
    const AgentState s0 = initial_state(config, start_offset);
    const AgentState s1 = step(s0, config, config.d_threshold, none);
    const double dx = (s1.human.x - s1.robot.x) - (s0.human.x - s0.robot.x);
    const double dy = (s1.human.y - s1.robot.y) - (s0.human.y - s0.robot.y);
    out.impact_speed = std::hypot(dx, dy) / config.timestep_T;
  }
  if (out.collided) {
    out.collision_force_Fc =
        collision_force(*out.impact_speed, config.effective_mass_mu, config.contact_stiffness_k);
  }
  out.severity = severity(out.collision_force_Fc, config.F_max, out.collided);
  out.reaction_triggered_step = reactions.triggered_step;
  out.reaction_effective_step = reactions.effective_step;
  return out;
}

TrialOutcome run_trial(const ScenarioConfig& config, const TrialParams& params, RandomStream stream) {
  const double offset = config.geometry.start_jitter * stream.uniform();
  return run_trial_with_offset(config, params, offset);
}

bool nominal_paths_approach(const ScenarioConfig& config) {
  const TrialParams never_reacts{config.horizon_K + 1, 0.0, 0.0};
  return run_trial_with_offset(config, never_reacts, 0.0).collided;
}

bool is_dangerous(const ScenarioConfig& config, const TrialOutcome& outcome) {
  return config.danger == DangerPredicate::kCollision ? outcome.collided : outcome.below_threshold;
}

}  // namespace hrisk
