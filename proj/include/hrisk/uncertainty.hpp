#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "hrisk/random_stream.hpp"

namespace hrisk {

enum class UncertaintyClass { kStatistical, kSystematic };

std::string_view to_string(UncertaintyClass c);
UncertaintyClass uncertainty_class_from_string(std::string_view s);

/// Safety-reaction delay u_t = N * T with N uniform on {delay_steps_min, ..., delay_steps_max}.
struct TemporalUncertaintyModel {
  double timestep_T = 0.05;  // s
  int delay_steps_min = 0;
  int delay_steps_max = 9;

  void validate() const;
  friend bool operator==(const TemporalUncertaintyModel&, const TemporalUncertaintyModel&) = default;
};

/// Distance-measurement deviation u_s = delta_d0 + c * v_H, with
/// delta_d0 ~ Gaussian(mean, std) and c ~ Uniform[c_min, c_max], both
/// drawn once per trial.
struct SpatialUncertaintyModel {
  double delta_d0_mean = 0.0;  // m
  double delta_d0_std = 0.05;  // m
  double c_min = 0.0;          // s
  double c_max = 0.05;         // s

  void validate() const;
  friend bool operator==(const SpatialUncertaintyModel&, const SpatialUncertaintyModel&) = default;
};

struct UncertaintySpec {
  TemporalUncertaintyModel temporal;
  SpatialUncertaintyModel spatial;
  UncertaintyClass temporal_class = UncertaintyClass::kSystematic;
  UncertaintyClass spatial_class = UncertaintyClass::kStatistical;

  void validate() const;
  friend bool operator==(const UncertaintySpec&, const UncertaintySpec&) = default;
};

struct SpatialParams {
  double delta_d0 = 0.0;  // m
  double c = 0.0;         // s
};

/// One draw: N uniform on the configured range.
int sample_delay_steps(const TemporalUncertaintyModel& model, RandomStream& stream);
/// N * T for a given step count.
double delay_from_steps(const TemporalUncertaintyModel& model, int steps);
/// u_t in seconds. One draw.
double sample_temporal(const TemporalUncertaintyModel& model, RandomStream& stream);

/// (delta_d0, c). Three draws: two for the Gaussian, one for the uniform.
SpatialParams sample_spatial_params(const SpatialUncertaintyModel& model, RandomStream& stream);

constexpr double spatial_deviation(double delta_d0, double c, double human_speed) {
  return delta_d0 + c * human_speed;
}

/// Measured distance reported to the robot; clamped at zero.
constexpr double perturb_distance(double true_distance, double u_s) {
  const double d = true_distance + u_s;
  return d < 0.0 ? 0.0 : d;
}

}  // namespace hrisk
