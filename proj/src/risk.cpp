#include "hrisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "hrisk/errors.hpp"

namespace hrisk {
namespace {

constexpr std::uint64_t kSweepTag = 0x5357;  // "SW"

void fill_statistics(ConstellationStats& cell, std::span<const TrialOutcome> outcomes) {
  cell.trials = outcomes.size();
  if (outcomes.empty()) return;
  std::vector<double> all;
  std::vector<double> given;
  all.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    all.push_back(o.severity);
    if (o.collided) {
      ++cell.collisions;
      given.push_back(o.severity);
    }
    if (o.below_threshold) ++cell.threshold_events;
  }
  const double n = static_cast<double>(cell.trials);
  cell.p_hat = static_cast<double>(cell.collisions) / n;
  cell.expected_severity = std::accumulate(all.begin(), all.end(), 0.0) / n;
  cell.severity_q50_all = quantile(all, 0.50);
  cell.severity_q90_all = quantile(all, 0.90);
  cell.severity_q99_all = quantile(all, 0.99);
  if (!given.empty()) {
    cell.mean_severity_given_collision =
        std::accumulate(given.begin(), given.end(), 0.0) / static_cast<double>(given.size());
    cell.severity_q50 = quantile(given, 0.50);
    cell.severity_q90 = quantile(given, 0.90);
    cell.severity_q99 = quantile(given, 0.99);
  }
}

std::optional<double> conditional_quantile(const ConstellationStats& cell, double level) {
  if (level == 0.5) return cell.severity_q50;
  if (level == 0.9) return cell.severity_q90;
  if (level == 0.99) return cell.severity_q99;
  throw ConfigError("severity_quantile must be one of 0.5, 0.9, 0.99");
}

}  // namespace

std::string_view to_string(SweepMode m) { return m == SweepMode::k2D ? "2d" : "3d"; }

SweepMode sweep_mode_from_string(std::string_view s) {
  if (s == "2d") return SweepMode::k2D;
  if (s == "3d") return SweepMode::k3D;
  throw ConfigError("unknown sweep mode '" + std::string(s) + "' (expected 2d or 3d)");
}

std::size_t SweepGrid::constellation_count() const {
  if (mode == SweepMode::k2D) return delay_steps.size() * u_s.size();
  return delay_steps.size() * delta_d0.size() * c.size();
}

void SweepGrid::validate() const {
  if (constellation_count() == 0) {
    throw ConfigError(mode == SweepMode::k2D
                          ? "sweep grid is empty: delay_steps and u_s need at least one value each"
                          : "sweep grid is empty: delay_steps, delta_d0 and c need at least one value each");
  }
  for (int n : delay_steps) {
    if (n < 0) throw ConfigError("sweep delay_steps must be >= 0");
  }
  if (table_bins < 1) throw ConfigError("sweep table_bins must be >= 1");
}

double quantile(std::vector<double> values, double level) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

TrialParams constellation_params(const SweepGrid& grid, std::size_t index) {
  TrialParams p;
  if (grid.mode == SweepMode::k2D) {
    const std::size_t nu = grid.u_s.size();
    p.delay_steps = grid.delay_steps[index / nu];
    p.delta_d0 = grid.u_s[index % nu];
    p.c = 0.0;
    return p;
  }
  const std::size_t nd = grid.delta_d0.size();
  const std::size_t nc = grid.c.size();
  p.delay_steps = grid.delay_steps[index / (nd * nc)];
  p.delta_d0 = grid.delta_d0[(index / nc) % nd];
  p.c = grid.c[index % nc];
  return p;
}

RandomStream sweep_trial_stream(std::uint64_t master_seed, std::uint64_t trial) {
  return RandomStream(master_seed, {kSweepTag, trial});
}

RiskSurface sweep(const ScenarioConfig& config, const UncertaintySpec& spec, const SweepGrid& grid,
                  std::uint64_t trials_per_constellation, std::uint64_t master_seed, Exec exec) {
  grid.validate();
  if (trials_per_constellation < 1) throw ConfigError("trials_per_constellation must be >= 1");
  spec.validate();

  RiskSurface surface;
  surface.grid = grid;
  surface.kind = config.kind;
  surface.timestep_T = config.timestep_T;
  surface.human_speed_vH = config.human_speed_vH;
  surface.trials_per_constellation = trials_per_constellation;
  surface.master_seed = master_seed;

  const std::size_t constellations = grid.constellation_count();
  std::vector<RandomStream> trial_streams;
  trial_streams.reserve(trials_per_constellation);
  for (std::uint64_t t = 0; t < trials_per_constellation; ++t) {
    trial_streams.push_back(sweep_trial_stream(master_seed, t));
  }
  std::vector<TrialJob> jobs;
  jobs.reserve(constellations * trials_per_constellation);
  for (std::size_t i = 0; i < constellations; ++i) {
    const TrialParams params = constellation_params(grid, i);
    for (const auto& stream : trial_streams) jobs.push_back({params, stream});
  }
  const std::vector<TrialOutcome> outcomes = run_trials(config, jobs, exec);

  surface.cells.resize(constellations);
  for (std::size_t i = 0; i < constellations; ++i) {
    ConstellationStats& cell = surface.cells[i];
    const TrialParams params = constellation_params(grid, i);
    cell.delay_steps = params.delay_steps;
    cell.delta_d0 = params.delta_d0;
    cell.c = params.c;
    cell.u_t = params.delay_steps * config.timestep_T;
    cell.u_s = spatial_deviation(params.delta_d0, params.c, config.human_speed_vH);
    const std::span<const TrialOutcome> mine(outcomes.data() + i * trials_per_constellation,
                                             trials_per_constellation);
    fill_statistics(cell, mine);
    for (const auto& o : mine) {
      if (o.collided) surface.collision_severities.push_back(o.severity);
    }
  }
  surface.total_trials = outcomes.size();
  return surface;
}

RiskValue risk_value(const ConstellationStats& cell) {
  if (!cell.p_hat) throw ConfigError("risk_value of a constellation without trials");
  RiskValue v;
  v.probability = *cell.p_hat;
  v.expected_severity = cell.expected_severity.value_or(0.0);
  v.scalar_risk = v.probability * cell.mean_severity_given_collision.value_or(0.0);
  return v;
}

SafetyEvaluation evaluate_safety_limit(const RiskSurface& surface, double lambda, double severity_limit,
                                       double severity_quantile) {
  if (surface.cells.empty()) throw ConfigError("cannot evaluate safety limits on an empty surface");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (std::isnan(severity_limit)) throw ConfigError("severity_limit must be a number");

  SafetyEvaluation eval;
  eval.lambda = lambda;
  eval.severity_limit = severity_limit;
  eval.severity_quantile = severity_quantile;
  eval.admissible.assign(surface.cells.size(), false);

  std::vector<std::size_t> evaluated;
  for (std::size_t i = 0; i < surface.cells.size(); ++i) {
    const auto& cell = surface.cells[i];
    if (!cell.p_hat) continue;
    evaluated.push_back(i);
    const double sev = conditional_quantile(cell, severity_quantile).value_or(0.0);
    eval.admissible[i] = *cell.p_hat <= lambda && sev <= severity_limit;
    if (eval.admissible[i]) ++eval.admissible_count;
  }
  eval.evaluated_count = evaluated.size();
  if (eval.admissible_count == 0) {
    eval.no_admissible_components = true;
    return eval;
  }

  std::set<double> ut_values;
  for (std::size_t i : evaluated) ut_values.insert(surface.cells[i].u_t);

  std::size_t best_count = 0;
  for (double a : ut_values) {
    double blocked = std::numeric_limits<double>::infinity();
    for (std::size_t i : evaluated) {
      const auto& cell = surface.cells[i];
      if (cell.u_t <= a && !eval.admissible[i]) blocked = std::min(blocked, std::abs(cell.u_s));
    }
    std::optional<double> b;
    for (std::size_t i : evaluated) {
      const auto& cell = surface.cells[i];
      const double mag = std::abs(cell.u_s);
      if (cell.u_t <= a && mag < blocked && (!b || mag > *b)) b = mag;
    }
    if (!b) continue;
    std::size_t count = 0;
    for (std::size_t i : evaluated) {
      const auto& cell = surface.cells[i];
      if (cell.u_t <= a && std::abs(cell.u_s) <= *b) ++count;
    }
    // Ties prefer the larger delay; ut_values ascend so >= keeps the last.
    if (count >= best_count) {
      best_count = count;
      eval.tolerated_u_t_max = a;
      eval.tolerated_u_s_max = *b;
    }
  }
  eval.box_constellations = best_count;
  if (eval.tolerated_u_t_max) {
    eval.tolerated_delay_steps = static_cast<int>(std::llround(*eval.tolerated_u_t_max / surface.timestep_T));
  }
  return eval;
}

std::string safety_summary(const RiskSurface& surface, const SafetyEvaluation& eval) {
  std::string out;
  out += fmt::format("Safety evaluation ({} scenario, {} constellations, {} trials each)\n",
                     to_string(surface.kind), surface.cells.size(), surface.trials_per_constellation);
  out += fmt::format("  probability limit lambda : {:.6g}\n", eval.lambda);
  out += fmt::format("  severity limit           : {} (collision-conditioned q{})\n", eval.severity_limit,
                     static_cast<int>(std::lround(eval.severity_quantile * 100)));
  out += fmt::format("  admissible constellations: {} of {}\n", eval.admissible_count, eval.evaluated_count);
  if (eval.no_admissible_components) {
    out += "  result: no admissible components - no simulated uncertainty constellation meets both limits\n";
    return out;
  }
  if (!eval.tolerated_u_t_max) {
    out += "  result: admissible constellations exist, but none at minimal uncertainty; no tolerated box\n";
    return out;
  }
  out += fmt::format("  tolerated temporal uncertainty u_t <= {:.6g} s ({} delay steps)\n", *eval.tolerated_u_t_max,
                     *eval.tolerated_delay_steps);
  out += fmt::format("  tolerated spatial uncertainty |u_s| <= {:.6g} m\n", *eval.tolerated_u_s_max);
  out += fmt::format("  constellations inside the tolerated box: {}\n", eval.box_constellations);
  return out;
}

}  // namespace hrisk
