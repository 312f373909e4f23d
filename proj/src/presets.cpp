#include "hrisk/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hrisk/errors.hpp"
#include "hrisk/scenario.hpp"

namespace hrisk {
namespace {

const std::vector<Interval> kUnitSquare{{0.0, 1.0}, {0.0, 1.0}};

// Deliberately off the e = 10 grid lines so the box straddles several cells.
const std::vector<Interval> kSmallBox{{0.33, 0.43}, {0.57, 0.67}};
const std::vector<Interval> kLargeBox{{0.125, 0.875}, {0.15, 0.75}};

double box_area(const std::vector<Interval>& box) {
  double a = 1.0;
  for (const auto& iv : box) a *= iv.width();
  return a;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

CriticalityPredicate box_predicate(std::vector<Interval> box) {
  return [box = std::move(box)](std::span<const double> point, RandomStream&) {
    for (std::size_t d = 0; d < box.size(); ++d) {
      if (point[d] < box[d].lo || point[d] > box[d].hi) return false;
    }
    return true;
  };
}

std::vector<std::string> benchmark_names() { return {"box-small", "box-large", "normal", "empty"}; }

bool is_benchmark_name(std::string_view name) {
  const auto names = benchmark_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

EstimationProblem benchmark_problem(std::string_view name) {
  if (name == "box-small") {
    return {"box-small", SampleSpace(kUnitSquare), box_predicate(kSmallBox), box_area(kSmallBox)};
  }
  if (name == "box-large") {
    return {"box-large", SampleSpace(kUnitSquare), box_predicate(kLargeBox), box_area(kLargeBox)};
  }
  if (name == "normal") {
    auto predicate = [](std::span<const double> x, RandomStream& stream) {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return stream.uniform() < std::exp(-0.5 * r2);
    };
    // (1/36) * 2 pi * (Phi(3) - Phi(-3))^2
    const double mass = standard_normal_cdf(3.0) - standard_normal_cdf(-3.0);
    return {"normal", SampleSpace({{-3.0, 3.0}, {-3.0, 3.0}}), predicate,
            2.0 * std::numbers::pi * mass * mass / 36.0};
  }
  if (name == "empty") {
    return {"empty", SampleSpace(kUnitSquare),
            [](std::span<const double>, RandomStream&) { return false; }, 0.0};
  }
  throw ConfigError("unknown benchmark '" + std::string(name) + "'");
}

EstimationProblem scenario_problem(const ExperimentConfig& config) {
  const auto& temporal = config.uncertainty.temporal;
  const auto& spatial = config.uncertainty.spatial;
  const double v = config.scenario.human_speed_vH;
  const Interval delay{static_cast<double>(temporal.delay_steps_min),
                       static_cast<double>(temporal.delay_steps_max) + 1.0};

  std::vector<Interval> bounds;
  if (config.estimator.bounds) {
    bounds = *config.estimator.bounds;
  } else if (config.estimator.space_mode == SpaceMode::k2D) {
    const double lo = spatial.delta_d0_mean - 4.0 * spatial.delta_d0_std + std::min(spatial.c_min * v, spatial.c_max * v);
    const double hi = spatial.delta_d0_mean + 4.0 * spatial.delta_d0_std + std::max(spatial.c_min * v, spatial.c_max * v);
    bounds = {delay, {lo, hi}};
  } else {
    bounds = {delay,
              {spatial.delta_d0_mean - 4.0 * spatial.delta_d0_std, spatial.delta_d0_mean + 4.0 * spatial.delta_d0_std},
              {spatial.c_min, spatial.c_max}};
  }
  for (const auto& iv : bounds) {
    if (!(iv.hi > iv.lo)) {
      throw ConfigError("the scenario sample space is degenerate along an axis; set estimator.bounds explicitly");
    }
  }

  const ScenarioConfig scenario = config.scenario;
  const int n_min = temporal.delay_steps_min;
  const int n_max = temporal.delay_steps_max;
  const bool three_d = config.estimator.space_mode == SpaceMode::k3D;
  CriticalityPredicate predicate = [scenario, n_min, n_max, three_d](std::span<const double> x,
                                                                     RandomStream& stream) {
    TrialParams params;
    params.delay_steps = std::clamp(static_cast<int>(std::floor(x[0])), n_min, n_max);
    params.delta_d0 = x[1];
    params.c = three_d ? x[2] : 0.0;
    return is_dangerous(scenario, run_trial(scenario, params, stream));
  };
  return {std::string("scenario-") + std::string(to_string(scenario.kind)), SampleSpace(std::move(bounds)),
          std::move(predicate), std::nullopt};
}

EstimationProblem make_problem(const ExperimentConfig& config) {
  if (config.estimator.benchmark) return benchmark_problem(*config.estimator.benchmark);
  return scenario_problem(config);
}

std::vector<std::string> experiment_preset_names() {
  return {"scenario-a", "scenario-b", "scenario-c", "scenario-a-analytic"};
}

bool is_experiment_preset(std::string_view name) {
  const auto names = experiment_preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentConfig experiment_preset(std::string_view name) {
  ExperimentConfig c;
  c.scenario.timestep_T = 0.05;
  c.uncertainty.temporal.timestep_T = 0.05;
  if (name == "scenario-a" || name == "scenario-a-analytic") {
    // Closing speed 1.8 m/s: the reaction must start within ceil(0.5 / 1.8 / 0.05) = 6 steps.
    c.scenario.kind = ScenarioKind::kApproach;
    c.scenario.horizon_K = 200;
    c.scenario.d_threshold = 0.5;
    c.scenario.human_speed_vH = 0.8;
    c.scenario.robot_speed = 1.0;
    c.scenario.geometry.initial_separation = 3.0;
    c.scenario.geometry.start_jitter = 0.09;
    if (name == "scenario-a-analytic") {
      c.uncertainty.spatial = {0.0, 0.0, 0.0, 0.0};
      c.sweep.mode = SweepMode::k2D;
      c.sweep.u_s = {AxisDefinition::Kind::kValues, {-0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2}, 0, 0, 0};
      c.sweep.trials_per_constellation = 50;
      c.estimator.bounds = std::vector<Interval>{{0.0, 10.0}, {-0.1, 0.2}};
      c.safety.severity_limit = std::numeric_limits<double>::infinity();
    }
    return c;
  }
  if (name == "scenario-b") {
    c.scenario.kind = ScenarioKind::kSharedReach;
    c.scenario.horizon_K = 200;
    c.scenario.d_threshold = 0.45;
    c.scenario.human_speed_vH = 0.8;
    c.scenario.robot_speed = 1.0;
    c.scenario.geometry.human_path_length = 1.2;
    c.scenario.geometry.robot_path_length = 1.0;
    c.scenario.geometry.contact_radius = 0.2;
    c.scenario.geometry.start_jitter = 0.2;
    return c;
  }
  if (name == "scenario-c") {
    c.scenario.kind = ScenarioKind::kMobileStop;
    c.scenario.horizon_K = 200;
    c.scenario.d_threshold = 0.8;
    c.scenario.human_speed_vH = 1.0;
    c.scenario.robot_speed = 1.0;
    c.scenario.geometry.initial_separation = 1.5;
    c.scenario.geometry.crossing_offset = 1.5;
    c.scenario.geometry.contact_radius = 0.3;
    c.scenario.geometry.start_jitter = 0.6;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace hrisk
