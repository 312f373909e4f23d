#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrisk/config.hpp"
#include "hrisk/kernels.hpp"
#include "hrisk/sample_space.hpp"

namespace hrisk {

/// A sample space paired with its criticality predicate.
struct EstimationProblem {
  std::string name;
  SampleSpace space;
  CriticalityPredicate predicate;
  std::optional<double> true_probability;  // known for the analytic benchmarks
};

/// Critical iff the point lies in the closed box.
CriticalityPredicate box_predicate(std::vector<Interval> box);

/// Built-in problems that need no scenario:
///   box-small   unit square, critical box of area 0.01
///   box-large   unit square, critical box of area 0.45
///   normal      [-3, 3]^2, critical with probability exp(-|x|^2 / 2)
///   empty       unit square, never critical
EstimationProblem benchmark_problem(std::string_view name);
bool is_benchmark_name(std::string_view name);
std::vector<std::string> benchmark_names();

/// Scenario-backed problem over (delay steps, u_s) in 2-D mode or
/// (delay steps, delta_d0, c) in 3-D mode. The delay axis is continuous
/// over [min, max + 1) and floored to an integer step count.
EstimationProblem scenario_problem(const ExperimentConfig& config);

/// The benchmark named in the config if any, otherwise the scenario problem.
EstimationProblem make_problem(const ExperimentConfig& config);

/// Experiment presets: scenario-a, scenario-b, scenario-c, and
/// scenario-a-analytic (kind A with zero spatial deviation and a 2-D sweep
/// whose spatial axis contains 0).
ExperimentConfig experiment_preset(std::string_view name);
bool is_experiment_preset(std::string_view name);
std::vector<std::string> experiment_preset_names();

}  // namespace hrisk
