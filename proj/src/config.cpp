#include "hrisk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "hrisk/errors.hpp"

namespace hrisk {

using nlohmann::json;

namespace {

constexpr std::uint64_t kAxisTag = 0x4158;  // "AX"

/// Reads fields of one JSON object and remembers which keys were consumed so
/// that leftovers can be reported as unknown.
class StrictObject {
 public:
  StrictObject(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", label()));
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return doc_.contains(key); }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        const auto s = v->get<std::string>();
        if (s == "inf" || s == "infinity") {
          out = std::numeric_limits<double>::infinity();
          return;
        }
      }
      if (!v->is_number()) throw ConfigError(fmt::format("{} must be a number", child_path(key)));
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(fmt::format("{} must be an integer", child_path(key)));
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(fmt::format("{} is out of range", child_path(key)));
      }
      out = static_cast<int>(x);
    }
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(fmt::format("{} must be a non-negative integer", child_path(key)));
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(fmt::format("{} must be true or false", child_path(key)));
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(const char* key) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(fmt::format("{} must be a string", child_path(key)));
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("unknown config key '{}'", child_path(key.c_str())));
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config document" : "'" + path_ + "'"; }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

AxisDefinition::Kind axis_kind_from_string(const std::string& s, const std::string& path) {
  if (s == "values") return AxisDefinition::Kind::kValues;
  if (s == "linspace") return AxisDefinition::Kind::kLinspace;
  if (s == "range") return AxisDefinition::Kind::kRange;
  if (s == "draw") return AxisDefinition::Kind::kDraw;
  throw ConfigError(fmt::format("{}.kind '{}' is not one of values, linspace, range, draw", path, s));
}

const char* to_string(AxisDefinition::Kind k) {
  switch (k) {
    case AxisDefinition::Kind::kValues: return "values";
    case AxisDefinition::Kind::kLinspace: return "linspace";
    case AxisDefinition::Kind::kRange: return "range";
    case AxisDefinition::Kind::kDraw: return "draw";
  }
  return "?";
}

std::vector<double> number_list(const json& doc, const std::string& path) {
  if (!doc.is_array()) throw ConfigError(fmt::format("{} must be an array of numbers", path));
  std::vector<double> out;
  for (const auto& v : doc) {
    if (!v.is_number()) throw ConfigError(fmt::format("{} must be an array of numbers", path));
    out.push_back(v.get<double>());
  }
  return out;
}

void read_axis(StrictObject& parent, const char* key, AxisDefinition& axis) {
  const json* doc = parent.find(key);
  if (!doc) return;
  const std::string path = parent.child_path(key);
  if (doc->is_array()) {
    axis = AxisDefinition{AxisDefinition::Kind::kValues, number_list(*doc, path), 0, 0, 0};
    return;
  }
  StrictObject obj(*doc, path);
  AxisDefinition next;
  const auto kind = obj.string("kind");
  if (!kind) throw ConfigError(fmt::format("{}.kind is required", path));
  next.kind = axis_kind_from_string(*kind, path);
  if (const json* values = obj.find("values")) next.values = number_list(*values, path + ".values");
  obj.number("min", next.min);
  obj.number("max", next.max);
  obj.integer("count", next.count);
  obj.finish();
  axis = std::move(next);
}

json axis_to_json(const AxisDefinition& axis) {
  json j{{"kind", to_string(axis.kind)}};
  switch (axis.kind) {
    case AxisDefinition::Kind::kValues: j["values"] = axis.values; break;
    case AxisDefinition::Kind::kLinspace: j["min"] = axis.min; j["max"] = axis.max; j["count"] = axis.count; break;
    case AxisDefinition::Kind::kRange: j["min"] = axis.min; j["max"] = axis.max; break;
    case AxisDefinition::Kind::kDraw: j["count"] = axis.count; break;
  }
  return j;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void read_temporal(StrictObject& parent, TemporalUncertaintyModel& t, bool& saw_timestep) {
  const json* doc = parent.find("temporal");
  if (!doc) return;
  StrictObject obj(*doc, parent.child_path("temporal"));
  saw_timestep = obj.has("timestep_T");
  obj.number("timestep_T", t.timestep_T);
  obj.integer("delay_steps_min", t.delay_steps_min);
  obj.integer("delay_steps_max", t.delay_steps_max);
  obj.finish();
}

void read_spatial(StrictObject& parent, SpatialUncertaintyModel& s) {
  const json* doc = parent.find("spatial");
  if (!doc) return;
  StrictObject obj(*doc, parent.child_path("spatial"));
  obj.number("delta_d0_mean", s.delta_d0_mean);
  obj.number("delta_d0_std", s.delta_d0_std);
  obj.number("c_min", s.c_min);
  obj.number("c_max", s.c_max);
  obj.finish();
}

void read_uncertainty(StrictObject& obj, UncertaintySpec& spec, bool& saw_timestep) {
  read_temporal(obj, spec.temporal, saw_timestep);
  read_spatial(obj, spec.spatial);
  if (const json* cls = obj.find("classification")) {
    StrictObject c(*cls, obj.child_path("classification"));
    if (auto t = c.string("temporal")) spec.temporal_class = uncertainty_class_from_string(*t);
    if (auto s = c.string("spatial")) spec.spatial_class = uncertainty_class_from_string(*s);
    c.finish();
  }
  obj.finish();
}

void read_scenario(const json& doc, ScenarioConfig& s) {
  StrictObject obj(doc, "scenario");
  if (auto kind = obj.string("kind")) s.kind = scenario_kind_from_string(*kind);
  obj.number("timestep_T", s.timestep_T);
  obj.integer("horizon_K", s.horizon_K);
  obj.number("d_threshold", s.d_threshold);
  obj.number("human_speed_vH", s.human_speed_vH);
  obj.number("robot_speed", s.robot_speed);
  obj.number("contact_stiffness_k", s.contact_stiffness_k);
  obj.number("effective_mass_mu", s.effective_mass_mu);
  obj.number("F_max", s.F_max);
  if (auto danger = obj.string("danger")) s.danger = danger_predicate_from_string(*danger);
  if (const json* geo = obj.find("geometry")) {
    StrictObject g(*geo, "scenario.geometry");
    g.number("initial_separation", s.geometry.initial_separation);
    g.number("crossing_offset", s.geometry.crossing_offset);
    g.number("human_path_length", s.geometry.human_path_length);
    g.number("robot_path_length", s.geometry.robot_path_length);
    g.number("contact_radius", s.geometry.contact_radius);
    g.number("start_jitter", s.geometry.start_jitter);
    g.finish();
  }
  obj.finish();
}

void read_estimator(const json& doc, EstimatorSettings& e) {
  StrictObject obj(doc, "estimator");
  obj.unsigned64("n", e.n);
  obj.number("beta", e.beta);
  obj.integer("edges_per_side", e.edges_per_side);
  obj.integer("repetitions", e.repetitions);
  if (const json* noise = obj.find("noise_scale")) {
    if (noise->is_null()) {
      e.noise_scale.reset();
    } else if (noise->is_number()) {
      e.noise_scale = noise->get<double>();
    } else {
      throw ConfigError("estimator.noise_scale must be a number or null");
    }
  }
  if (auto mode = obj.string("space_mode")) {
    if (*mode == "2d") e.space_mode = SpaceMode::k2D;
    else if (*mode == "3d") e.space_mode = SpaceMode::k3D;
    else throw ConfigError("estimator.space_mode must be 2d or 3d");
  }
  if (const json* bounds = obj.find("bounds")) {
    if (bounds->is_null()) {
      e.bounds.reset();
    } else {
      if (!bounds->is_array()) throw ConfigError("estimator.bounds must be an array of [lo, hi] pairs");
      std::vector<Interval> out;
      for (const auto& pair : *bounds) {
        const auto v = number_list(pair, "estimator.bounds[]");
        if (v.size() != 2) throw ConfigError("estimator.bounds entries must be [lo, hi] pairs");
        out.push_back({v[0], v[1]});
      }
      e.bounds = std::move(out);
    }
  }
  if (const json* bench = obj.find("benchmark")) {
    if (bench->is_null()) e.benchmark.reset();
    else if (bench->is_string()) e.benchmark = bench->get<std::string>();
    else throw ConfigError("estimator.benchmark must be a string or null");
  }
  obj.finish();
}

void read_sweep(const json& doc, SweepSettings& s) {
  StrictObject obj(doc, "sweep");
  if (auto mode = obj.string("mode")) s.mode = sweep_mode_from_string(*mode);
  read_axis(obj, "delay_steps", s.delay_steps);
  read_axis(obj, "delta_d0", s.delta_d0);
  read_axis(obj, "c", s.c);
  read_axis(obj, "u_s", s.u_s);
  obj.unsigned64("trials_per_constellation", s.trials_per_constellation);
  obj.integer("table_bins", s.table_bins);
  obj.finish();
}

void read_safety(const json& doc, SafetySettings& s) {
  StrictObject obj(doc, "safety");
  obj.number("lambda", s.lambda);
  obj.number("severity_limit", s.severity_limit);
  obj.number("severity_quantile", s.severity_quantile);
  if (const json* surface = obj.find("surface")) {
    if (surface->is_null()) s.surface.reset();
    else if (surface->is_string()) s.surface = surface->get<std::string>();
    else throw ConfigError("safety.surface must be a path string or null");
  }
  obj.finish();
}

void read_simulate(const json& doc, SimulateSettings& s) {
  StrictObject obj(doc, "simulate");
  obj.unsigned64("trials", s.trials);
  obj.boolean("sample_uncertainty", s.sample_uncertainty);
  if (const json* c = obj.find("constellation")) {
    StrictObject con(*c, "simulate.constellation");
    con.integer("delay_steps", s.constellation.delay_steps);
    con.number("delta_d0", s.constellation.delta_d0);
    con.number("c", s.constellation.c);
    con.finish();
  }
  obj.finish();
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

template <class Draw>
std::vector<double> resolve_axis(const AxisDefinition& axis, const char* name, Draw draw) {
  switch (axis.kind) {
    case AxisDefinition::Kind::kValues: return axis.values;
    case AxisDefinition::Kind::kLinspace:
      if (axis.count < 1) throw ConfigError(fmt::format("sweep.{}.count must be >= 1", name));
      return linspace(axis.min, axis.max, axis.count);
    case AxisDefinition::Kind::kRange: {
      std::vector<double> out;
      for (long v = std::lround(axis.min); v <= std::lround(axis.max); ++v) out.push_back(static_cast<double>(v));
      return out;
    }
    case AxisDefinition::Kind::kDraw: {
      if (axis.count < 1) throw ConfigError(fmt::format("sweep.{}.count must be >= 1", name));
      std::vector<double> out;
      for (int i = 0; i < axis.count; ++i) out.push_back(draw());
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  uncertainty.validate();
  if (std::abs(uncertainty.temporal.timestep_T - scenario.timestep_T) > 1e-12 * scenario.timestep_T) {
    throw ConfigError("uncertainty.temporal.timestep_T must equal scenario.timestep_T");
  }
  if (estimator.n < 1) throw ConfigError("estimator.n must be >= 1");
  if (!(estimator.beta > 0.0 && estimator.beta < 1.0)) throw ConfigError("estimator.beta must lie in (0, 1)");
  if (estimator.edges_per_side < 1) throw ConfigError("estimator.edges_per_side must be >= 1");
  if (estimator.repetitions < 1) throw ConfigError("estimator.repetitions must be >= 1");
  if (estimator.noise_scale && !(*estimator.noise_scale > 0.0)) {
    throw ConfigError("estimator.noise_scale must be > 0");
  }
  if (estimator.bounds && !estimator.benchmark) {
    const std::size_t want = estimator.space_mode == SpaceMode::k2D ? 2 : 3;
    if (estimator.bounds->size() != want) {
      throw ConfigError(fmt::format("estimator.bounds needs {} intervals for space_mode {}", want,
                                    want == 2 ? "2d" : "3d"));
    }
  }
  if (sweep.trials_per_constellation < 1) throw ConfigError("sweep.trials_per_constellation must be >= 1");
  if (sweep.table_bins < 1) throw ConfigError("sweep.table_bins must be >= 1");
  if (!(safety.lambda >= 0.0 && safety.lambda <= 1.0)) throw ConfigError("safety.lambda must lie in [0, 1]");
  if (std::isnan(safety.severity_limit)) throw ConfigError("safety.severity_limit must be a number");
  const double q = safety.severity_quantile;
  if (q != 0.5 && q != 0.9 && q != 0.99) throw ConfigError("safety.severity_quantile must be 0.5, 0.9 or 0.99");
  if (simulate.trials < 1) throw ConfigError("simulate.trials must be >= 1");
  if (simulate.constellation.delay_steps < 0) throw ConfigError("simulate.constellation.delay_steps must be >= 0");
}

ExperimentConfig apply_config_json(const json& doc, ExperimentConfig base) {
  StrictObject root(doc, "");
  bool scenario_timestep = false;
  bool temporal_timestep = false;
  if (const json* s = root.find("scenario")) {
    scenario_timestep = s->is_object() && s->contains("timestep_T");
    read_scenario(*s, base.scenario);
  }
  if (const json* u = root.find("uncertainty")) {
    StrictObject obj(*u, "uncertainty");
    read_uncertainty(obj, base.uncertainty, temporal_timestep);
  }
  if (scenario_timestep && !temporal_timestep) {
    base.uncertainty.temporal.timestep_T = base.scenario.timestep_T;
  }
  if (const json* e = root.find("estimator")) read_estimator(*e, base.estimator);
  if (const json* s = root.find("sweep")) read_sweep(*s, base.sweep);
  if (const json* s = root.find("safety")) read_safety(*s, base.safety);
  if (const json* s = root.find("simulate")) read_simulate(*s, base.simulate);
  root.unsigned64("master_seed", base.master_seed);
  if (auto out = root.string("output_dir")) base.output_dir = *out;
  root.finish();
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return apply_config_json(doc, std::move(base));
}

json to_json(const UncertaintySpec& spec) {
  return {
      {"temporal",
       {{"timestep_T", spec.temporal.timestep_T},
        {"delay_steps_min", spec.temporal.delay_steps_min},
        {"delay_steps_max", spec.temporal.delay_steps_max}}},
      {"spatial",
       {{"delta_d0_mean", spec.spatial.delta_d0_mean},
        {"delta_d0_std", spec.spatial.delta_d0_std},
        {"c_min", spec.spatial.c_min},
        {"c_max", spec.spatial.c_max}}},
      {"classification",
       {{"temporal", to_string(spec.temporal_class)}, {"spatial", to_string(spec.spatial_class)}}},
  };
}

UncertaintySpec uncertainty_from_json(const json& doc) {
  UncertaintySpec spec;
  StrictObject obj(doc, "uncertainty");
  bool unused = false;
  read_uncertainty(obj, spec, unused);
  spec.validate();
  return spec;
}

json to_json(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  json j;
  j["scenario"] = {
      {"kind", to_string(s.kind)},
      {"timestep_T", s.timestep_T},
      {"horizon_K", s.horizon_K},
      {"d_threshold", s.d_threshold},
      {"human_speed_vH", s.human_speed_vH},
      {"robot_speed", s.robot_speed},
      {"contact_stiffness_k", s.contact_stiffness_k},
      {"effective_mass_mu", s.effective_mass_mu},
      {"F_max", s.F_max},
      {"danger", to_string(s.danger)},
      {"geometry",
       {{"initial_separation", s.geometry.initial_separation},
        {"crossing_offset", s.geometry.crossing_offset},
        {"human_path_length", s.geometry.human_path_length},
        {"robot_path_length", s.geometry.robot_path_length},
        {"contact_radius", s.geometry.contact_radius},
        {"start_jitter", s.geometry.start_jitter}}},
  };
  j["uncertainty"] = to_json(c.uncertainty);

  json est = {{"n", c.estimator.n},
              {"beta", c.estimator.beta},
              {"edges_per_side", c.estimator.edges_per_side},
              {"repetitions", c.estimator.repetitions},
              {"space_mode", c.estimator.space_mode == SpaceMode::k2D ? "2d" : "3d"}};
  est["noise_scale"] = c.estimator.noise_scale ? json(*c.estimator.noise_scale) : json(nullptr);
  if (c.estimator.bounds) {
    json b = json::array();
    for (const auto& iv : *c.estimator.bounds) b.push_back({iv.lo, iv.hi});
    est["bounds"] = b;
  } else {
    est["bounds"] = nullptr;
  }
  est["benchmark"] = c.estimator.benchmark ? json(*c.estimator.benchmark) : json(nullptr);
  j["estimator"] = est;

  j["sweep"] = {{"mode", to_string(c.sweep.mode)},
                {"delay_steps", axis_to_json(c.sweep.delay_steps)},
                {"delta_d0", axis_to_json(c.sweep.delta_d0)},
                {"c", axis_to_json(c.sweep.c)},
                {"u_s", axis_to_json(c.sweep.u_s)},
                {"trials_per_constellation", c.sweep.trials_per_constellation},
                {"table_bins", c.sweep.table_bins}};
  j["safety"] = {{"lambda", c.safety.lambda},
                 {"severity_limit", number_or_inf(c.safety.severity_limit)},
                 {"severity_quantile", c.safety.severity_quantile}};
  j["safety"]["surface"] = c.safety.surface ? json(*c.safety.surface) : json(nullptr);
  j["simulate"] = {{"trials", c.simulate.trials},
                   {"sample_uncertainty", c.simulate.sample_uncertainty},
                   {"constellation",
                    {{"delay_steps", c.simulate.constellation.delay_steps},
                     {"delta_d0", c.simulate.constellation.delta_d0},
                     {"c", c.simulate.constellation.c}}}};
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  json doc = to_json(config);
  doc.erase("output_dir");  // where results go does not change what they are
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

SweepGrid resolve_sweep_grid(const ExperimentConfig& config) {
  const auto& s = config.sweep;
  const auto& spatial = config.uncertainty.spatial;
  SweepGrid grid;
  grid.mode = s.mode;
  grid.table_bins = s.table_bins;

  RandomStream delay_stream(config.master_seed, {kAxisTag, 0});
  for (double v : resolve_axis(s.delay_steps, "delay_steps", [&] {
         return static_cast<double>(sample_delay_steps(config.uncertainty.temporal, delay_stream));
       })) {
    if (v < 0 || v != std::floor(v)) throw ConfigError("sweep.delay_steps values must be non-negative integers");
    grid.delay_steps.push_back(static_cast<int>(v));
  }
  if (s.mode == SweepMode::k3D) {
    RandomStream d0_stream(config.master_seed, {kAxisTag, 1});
    RandomStream c_stream(config.master_seed, {kAxisTag, 2});
    grid.delta_d0 = resolve_axis(s.delta_d0, "delta_d0",
                                 [&] { return d0_stream.normal(spatial.delta_d0_mean, spatial.delta_d0_std); });
    grid.c = resolve_axis(s.c, "c", [&] { return c_stream.uniform(spatial.c_min, spatial.c_max); });
  } else {
    RandomStream us_stream(config.master_seed, {kAxisTag, 3});
    grid.u_s = resolve_axis(s.u_s, "u_s", [&] {
      const SpatialParams p = sample_spatial_params(spatial, us_stream);
      return spatial_deviation(p.delta_d0, p.c, config.scenario.human_speed_vH);
    });
  }
  grid.validate();
  return grid;
}

}  // namespace hrisk
