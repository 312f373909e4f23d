#include "hrisk/estimator.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "hrisk/errors.hpp"

namespace hrisk {
namespace {

constexpr std::uint64_t kMcTag = 0x4D43;     // "MC"
constexpr std::uint64_t kGridTag = 0x4749;   // "GI"

// Tolerates accumulated rounding in sums that are exactly 1 in real arithmetic.
constexpr double kOverOneSlack = 1e-9;

void finish_repetitions(EstimateReport& report) {
  const auto& reps = report.per_repetition;
  report.p_hat = reps.empty() ? 0.0 : std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  report.vae = sample_variance(reps);
  report.samples_total = report.samples_per_repetition * reps.size();
  if (!report.vae) {
    report.notes.emplace_back("single repetition: VAE is undefined and omitted");
  }
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::kMc ? "mc" : "grid-is"; }

Method method_from_string(std::string_view s) {
  if (s == "mc") return Method::kMc;
  if (s == "grid-is") return Method::kGridIs;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected mc or grid-is)");
}

std::optional<double> sample_variance(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

double default_noise_scale(std::size_t cell_count) { return 1.0 / (10.0 * static_cast<double>(cell_count)); }

std::uint64_t learning_samples(std::uint64_t n, double beta) {
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * beta));
}

EstimateReport mc_estimate(const SampleSpace& space, const CriticalityPredicate& predicate,
                           std::uint64_t n, const RandomStream& stream, Exec exec) {
  if (n < 1) throw ConfigError("mc_estimate needs n >= 1");
  EstimateReport report;
  report.method = Method::kMc;
  report.samples_per_repetition = n;
  const std::uint64_t critical = count_critical(space, predicate, n, stream, exec);
  report.per_repetition.push_back(static_cast<double>(critical) / static_cast<double>(n));
  finish_repetitions(report);
  report.notes.clear();
  return report;
}

LearnedGrid learn_grid_density(const GridPartition& partition, const CriticalityPredicate& predicate,
                               std::uint64_t n_learn, double noise_scale, const RandomStream& stream,
                               Exec exec) {
  if (n_learn < 1) throw ConfigError("learning phase needs at least one sample");
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) throw ConfigError("noise_scale must be > 0");

  LearnedGrid learned{partition, 0, critical_cells(partition, predicate, n_learn, stream.child(0), exec)};
  learned.critical_total = std::accumulate(learned.critical_per_cell.begin(),
                                           learned.critical_per_cell.end(), std::uint64_t{0});

  std::vector<double> density(partition.cell_count(), 0.0);
  RandomStream noise = stream.child(1);
  double total = 0.0;
  for (std::size_t g = 0; g < density.size(); ++g) {
    if (learned.critical_total > 0) {
      density[g] = static_cast<double>(learned.critical_per_cell[g]) /
                   static_cast<double>(learned.critical_total);
    }
    double jitter = std::abs(noise.normal(0.0, noise_scale));
    // A zero draw would leave an empty cell unreachable.
    if (jitter == 0.0) jitter = noise_scale * 0x1.0p-53;
    density[g] += jitter;
    total += density[g];
  }
  for (double& g : density) g /= total;
  learned.partition.set_densities(std::move(density));
  return learned;
}

IsResult is_estimate(const GridPartition& learned, const CriticalityPredicate& predicate,
                     std::uint64_t n, double beta, const RandomStream& stream, Exec exec,
                     InCellSampling mode) {
  if (n < 1) throw ConfigError("is_estimate needs n >= 1");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
  IsResult result;
  result.r = n - learning_samples(n, beta);
  if (result.r < 1) throw ConfigError("no samples left for the importance phase (n * (1 - beta) < 1)");

  const auto densities = learned.densities();
  double total = 0.0;
  for (std::size_t g = 0; g < densities.size(); ++g) {
    if (!(densities[g] > 0.0)) {
      throw DiagnosticError(fmt::format("importance phase asked to sample zero-density cell {}", g));
    }
    total += densities[g];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DiagnosticError(fmt::format("learned densities sum to {} instead of 1", total));
  }

  result.allocation = allocate_samples(result.r, densities);
  result.critical_per_cell = in_cell_critical(learned, result.allocation, predicate, stream, mode, exec);

  // g is the density the cell was actually sampled with: allocation / r.
  // It equals the learned density whenever r * g is integral.
  const double r = static_cast<double>(result.r);
  double output = 0.0;
  for (std::size_t g = 0; g < densities.size(); ++g) {
    if (result.allocation[g] == 0) continue;
    const double area_fraction = learned.cell_base_mass(g);
    const double sampled_density = static_cast<double>(result.allocation[g]) / r;
    output += static_cast<double>(result.critical_per_cell[g]) * area_fraction / sampled_density;
  }
  result.p_hat = output / static_cast<double>(result.r);
  if (result.p_hat > 1.0 + kOverOneSlack) {
    throw DiagnosticError(
        fmt::format("importance-sampling estimate {} exceeds 1: the learned density is broken", result.p_hat));
  }
  return result;
}

EstimateReport grid_is_estimate(const SampleSpace& space, const CriticalityPredicate& predicate,
                                std::uint64_t n, const GridIsSettings& settings,
                                const RandomStream& stream, Exec exec) {
  if (!(settings.beta > 0.0 && settings.beta < 1.0)) {
    throw ConfigError("grid IS needs beta in (0, 1) so that the learning phase has samples");
  }
  GridPartition partition(space, settings.edges_per_side);
  const double noise = settings.noise_scale.value_or(default_noise_scale(partition.cell_count()));
  const std::uint64_t n_learn = learning_samples(n, settings.beta);

  LearnedGrid learned = learn_grid_density(partition, predicate, n_learn, noise, stream.child(0), exec);
  IsResult is = is_estimate(learned.partition, predicate, n, settings.beta, stream.child(1), exec);

  EstimateReport report;
  report.method = Method::kGridIs;
  report.samples_per_repetition = n;
  report.beta = settings.beta;
  report.edges_per_side = settings.edges_per_side;
  report.noise_scale = noise;
  report.single_cell = partition.cell_count() == 1;
  report.per_repetition.push_back(is.p_hat);

  GridRepetition grid;
  grid.learn_samples = n_learn;
  grid.learn_critical = learned.critical_total;
  grid.learn_critical_per_cell = std::move(learned.critical_per_cell);
  const auto densities = learned.partition.densities();
  grid.densities.assign(densities.begin(), densities.end());
  grid.allocation = std::move(is.allocation);
  grid.critical_per_cell = std::move(is.critical_per_cell);
  report.grids.push_back(std::move(grid));

  finish_repetitions(report);
  report.notes.clear();
  return report;
}

EstimateReport repeat_mc(const SampleSpace& space, const CriticalityPredicate& predicate,
                         std::uint64_t n, int repetitions, std::uint64_t master_seed, Exec exec) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  EstimateReport report;
  report.method = Method::kMc;
  report.samples_per_repetition = n;
  report.master_seed = master_seed;
  for (int rep = 0; rep < repetitions; ++rep) {
    const RandomStream stream(master_seed, {kMcTag, static_cast<std::uint64_t>(rep)});
    report.per_repetition.push_back(mc_estimate(space, predicate, n, stream, exec).p_hat);
  }
  finish_repetitions(report);
  return report;
}

EstimateReport repeat_grid_is(const SampleSpace& space, const CriticalityPredicate& predicate,
                              std::uint64_t n, const GridIsSettings& settings, int repetitions,
                              std::uint64_t master_seed, Exec exec) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  EstimateReport report;
  report.method = Method::kGridIs;
  report.samples_per_repetition = n;
  report.master_seed = master_seed;
  for (int rep = 0; rep < repetitions; ++rep) {
    const RandomStream stream(master_seed, {kGridTag, static_cast<std::uint64_t>(rep)});
    EstimateReport one = grid_is_estimate(space, predicate, n, settings, stream, exec);
    report.per_repetition.push_back(one.p_hat);
    report.beta = one.beta;
    report.edges_per_side = one.edges_per_side;
    report.noise_scale = one.noise_scale;
    report.single_cell = one.single_cell;
    report.grids.push_back(std::move(one.grids.front()));
  }
  finish_repetitions(report);
  if (report.single_cell) {
    report.notes.emplace_back("edges_per_side = 1: single cell, grid IS degenerates to plain MC");
  }
  return report;
}

std::pair<EstimateReport, EstimateReport> vae_compare(const SampleSpace& space,
                                                      const CriticalityPredicate& predicate,
                                                      std::uint64_t n, const GridIsSettings& settings,
                                                      int repetitions, std::uint64_t master_seed,
                                                      Exec exec) {
  if (repetitions < 2) throw ConfigError("vae_compare needs at least 2 repetitions (R >= 2)");
  return {repeat_mc(space, predicate, n, repetitions, master_seed, exec),
          repeat_grid_is(space, predicate, n, settings, repetitions, master_seed, exec)};
}

}  // namespace hrisk
