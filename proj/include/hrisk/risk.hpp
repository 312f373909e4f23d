#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrisk/kernels.hpp"
#include "hrisk/scenario.hpp"
#include "hrisk/uncertainty.hpp"

namespace hrisk {

/// k3D conditions each constellation on exact (N, delta_d0, c).
/// k2D folds c into an effective u_s at the nominal human speed, so a
/// constellation is (N, u_s) and trials run with delta_d0 = u_s, c = 0.
enum class SweepMode { k2D, k3D };

std::string_view to_string(SweepMode m);
SweepMode sweep_mode_from_string(std::string_view s);

struct SweepGrid {
  SweepMode mode = SweepMode::k3D;
  std::vector<int> delay_steps;
  std::vector<double> delta_d0;  // k3D
  std::vector<double> c;         // k3D
  std::vector<double> u_s;       // k2D
  int table_bins = 10;           // spatial columns of the delay x deviation table (k3D)

  [[nodiscard]] std::size_t constellation_count() const;
  void validate() const;
};

struct ConstellationStats {
  int delay_steps = 0;
  double delta_d0 = 0.0;
  double c = 0.0;
  double u_t = 0.0;  // s
  double u_s = 0.0;  // m, effective deviation at the nominal human speed
  std::uint64_t trials = 0;
  std::uint64_t collisions = 0;
  std::uint64_t threshold_events = 0;  // true distance fell below d_threshold
  // Absent when trials == 0.
  std::optional<double> p_hat;
  std::optional<double> expected_severity;  // includes zeros for non-collisions
  // Conditioned on collision; absent without collisions.
  std::optional<double> mean_severity_given_collision;
  std::optional<double> severity_q50;
  std::optional<double> severity_q90;
  std::optional<double> severity_q99;
  // Unconditional quantiles (zeros included).
  std::optional<double> severity_q50_all;
  std::optional<double> severity_q90_all;
  std::optional<double> severity_q99_all;
};

/// Empirical map from uncertainty constellation to dangerous-event
/// probability and severity statistics. Constellations are stored in grid
/// order: delay slowest, then delta_d0 (or u_s), then c.
struct RiskSurface {
  SweepGrid grid;
  ScenarioKind kind = ScenarioKind::kApproach;
  double timestep_T = 0.05;
  double human_speed_vH = 0.0;
  std::uint64_t trials_per_constellation = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::vector<ConstellationStats> cells;
  /// Severity of every collided trial, in constellation then trial order.
  std::vector<double> collision_severities;
  std::uint64_t total_trials = 0;
};

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::vector<double> values, double level);

/// Runs trials_per_constellation trials for every constellation. Trial t of
/// every constellation uses the same substream (master_seed, [sweep tag, t]),
/// so per-trial properties such as delay monotonicity carry over to the
/// probabilities.
RiskSurface sweep(const ScenarioConfig& config, const UncertaintySpec& spec, const SweepGrid& grid,
                  std::uint64_t trials_per_constellation, std::uint64_t master_seed, Exec exec = {});

/// Trial parameters of constellation `index` of the grid.
TrialParams constellation_params(const SweepGrid& grid, std::size_t index);
/// The shared stream used by trial t of any constellation.
RandomStream sweep_trial_stream(std::uint64_t master_seed, std::uint64_t trial);

struct RiskValue {
  double probability = 0.0;
  double expected_severity = 0.0;
  double scalar_risk = 0.0;  // probability * mean severity given collision
};

/// Throws ConfigError for an absent constellation.
RiskValue risk_value(const ConstellationStats& cell);

struct SafetyEvaluation {
  double lambda = 0.0;
  double severity_limit = std::numeric_limits<double>::infinity();
  double severity_quantile = 0.99;
  std::vector<bool> admissible;  // per constellation, surface order
  std::size_t admissible_count = 0;
  std::size_t evaluated_count = 0;
  bool no_admissible_components = false;
  // Largest origin-anchored box {u_t <= a, |u_s| <= b} containing only admissible constellations.
  std::optional<double> tolerated_u_t_max;  // s
  std::optional<int> tolerated_delay_steps;
  std::optional<double> tolerated_u_s_max;  // m
  std::size_t box_constellations = 0;
};

/// A constellation is admissible when p_hat <= lambda and its collision-
/// conditioned severity quantile (at severity_quantile: 0.5, 0.9 or 0.99)
/// is <= severity_limit; a constellation without collisions meets any
/// severity limit.
SafetyEvaluation evaluate_safety_limit(const RiskSurface& surface, double lambda, double severity_limit,
                                       double severity_quantile = 0.99);

std::string safety_summary(const RiskSurface& surface, const SafetyEvaluation& eval);

}  // namespace hrisk
