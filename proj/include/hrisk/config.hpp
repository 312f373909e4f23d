#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrisk/risk.hpp"
#include "hrisk/sample_space.hpp"
#include "hrisk/scenario.hpp"
#include "hrisk/uncertainty.hpp"

namespace hrisk {

/// How a sweep axis gets its values.
///   values   explicit list
///   linspace count evenly spaced values on [min, max]
///   range    every integer from min to max (delay axis)
///   draw     count draws from the axis' uncertainty model, sorted ascending
struct AxisDefinition {
  enum class Kind { kValues, kLinspace, kRange, kDraw };
  Kind kind = Kind::kValues;
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  friend bool operator==(const AxisDefinition&, const AxisDefinition&) = default;
};

enum class SpaceMode { k2D, k3D };

struct EstimatorSettings {
  std::uint64_t n = 3000;
  double beta = 0.2;
  int edges_per_side = 10;
  int repetitions = 10;
  std::optional<double> noise_scale;
  SpaceMode space_mode = SpaceMode::k2D;
  std::optional<std::vector<Interval>> bounds;
  std::optional<std::string> benchmark;  // built-in problem instead of the scenario
};

struct SweepSettings {
  SweepMode mode = SweepMode::k3D;
  AxisDefinition delay_steps{AxisDefinition::Kind::kRange, {}, 0, 9, 0};
  AxisDefinition delta_d0{AxisDefinition::Kind::kDraw, {}, 0, 0, 25};
  AxisDefinition c{AxisDefinition::Kind::kDraw, {}, 0, 0, 10};
  AxisDefinition u_s{AxisDefinition::Kind::kLinspace, {}, -0.15, 0.25, 9};
  std::uint64_t trials_per_constellation = 20;
  int table_bins = 10;
};

struct SafetySettings {
  double lambda = 0.1;
  double severity_limit = 1.0;
  double severity_quantile = 0.99;
  std::optional<std::string> surface;  // surface.json from an earlier sweep
};

struct SimulateSettings {
  std::uint64_t trials = 100;
  TrialParams constellation;
  bool sample_uncertainty = false;  // draw (N, delta_d0, c) per trial instead
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  UncertaintySpec uncertainty;
  EstimatorSettings estimator;
  SweepSettings sweep;
  SafetySettings safety;
  SimulateSettings simulate;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";

  /// Cross-field checks on top of each part's own validation.
  void validate() const;
};

/// Applies a JSON document on top of `base`. Unknown keys throw ConfigError
/// naming the dotted path of the offending key.
ExperimentConfig apply_config_json(const nlohmann::json& doc, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const UncertaintySpec& spec);
UncertaintySpec uncertainty_from_json(const nlohmann::json& doc);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Resolves the sweep axes; "draw" axes use the uncertainty models and the master seed.
SweepGrid resolve_sweep_grid(const ExperimentConfig& config);

}  // namespace hrisk
