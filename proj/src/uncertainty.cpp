#include "hrisk/uncertainty.hpp"

#include <cmath>
#include <string>

#include "hrisk/errors.hpp"

namespace hrisk {

std::string_view to_string(UncertaintyClass c) {
  return c == UncertaintyClass::kStatistical ? "statistical" : "systematic";
}

UncertaintyClass uncertainty_class_from_string(std::string_view s) {
  if (s == "statistical") return UncertaintyClass::kStatistical;
  if (s == "systematic") return UncertaintyClass::kSystematic;
  throw ConfigError("unknown uncertainty classification '" + std::string(s) +
                    "' (expected statistical or systematic)");
}

void TemporalUncertaintyModel::validate() const {
  if (!(timestep_T > 0.0) || !std::isfinite(timestep_T)) {
    throw ConfigError("temporal.timestep_T must be a positive finite number");
  }
  if (delay_steps_min < 0) {
    throw ConfigError("temporal.delay_steps_min must be >= 0");
  }
  if (delay_steps_max < delay_steps_min) {
    throw ConfigError("temporal.delay_steps_max must be >= delay_steps_min");
  }
}

void SpatialUncertaintyModel::validate() const {
  if (!std::isfinite(delta_d0_mean)) throw ConfigError("spatial.delta_d0_mean must be finite");
  if (!(delta_d0_std >= 0.0) || !std::isfinite(delta_d0_std)) {
    throw ConfigError("spatial.delta_d0_std must be >= 0");
  }
  if (!std::isfinite(c_min) || !std::isfinite(c_max) || c_max < c_min) {
    throw ConfigError("spatial.c_max must be >= c_min");
  }
}

void UncertaintySpec::validate() const {
  temporal.validate();
  spatial.validate();
}

int sample_delay_steps(const TemporalUncertaintyModel& model, RandomStream& stream) {
  return static_cast<int>(stream.uniform_int(model.delay_steps_min, model.delay_steps_max));
}

double delay_from_steps(const TemporalUncertaintyModel& model, int steps) {
  return steps * model.timestep_T;
}

double sample_temporal(const TemporalUncertaintyModel& model, RandomStream& stream) {
  return delay_from_steps(model, sample_delay_steps(model, stream));
}

SpatialParams sample_spatial_params(const SpatialUncertaintyModel& model, RandomStream& stream) {
  SpatialParams p;
  p.delta_d0 = stream.normal(model.delta_d0_mean, model.delta_d0_std);
  p.c = stream.uniform(model.c_min, model.c_max);
  return p;
}

}  // namespace hrisk
