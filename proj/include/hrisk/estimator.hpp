#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrisk/kernels.hpp"
#include "hrisk/sample_space.hpp"

namespace hrisk {

enum class Method { kMc, kGridIs };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// Per-repetition detail of a grid importance-sampling run.
struct GridRepetition {
  std::uint64_t learn_samples = 0;
  std::uint64_t learn_critical = 0;
  std::vector<std::uint64_t> learn_critical_per_cell;
  std::vector<double> densities;
  std::vector<std::uint64_t> allocation;
  std::vector<std::uint64_t> critical_per_cell;
};

struct EstimateReport {
  Method method = Method::kMc;
  double p_hat = 0.0;  // mean over repetitions
  std::vector<double> per_repetition;
  std::optional<double> vae;  // absent for a single repetition
  std::uint64_t samples_per_repetition = 0;
  std::uint64_t samples_total = 0;
  std::optional<double> beta;
  std::optional<int> edges_per_side;
  std::optional<double> noise_scale;
  bool single_cell = false;  // e = 1: grid IS reduces to plain MC on the non-learning share
  std::uint64_t master_seed = 0;
  std::vector<GridRepetition> grids;
  std::vector<std::string> notes;
};

/// Unbiased sample variance (R - 1 denominator); absent for fewer than two values.
std::optional<double> sample_variance(std::span<const double> values);

/// Default noise floor for the learned density: 1 / (10 * number of cells).
double default_noise_scale(std::size_t cell_count);

/// Learning-phase split: round(n * beta) samples learn, the rest feed the importance phase.
std::uint64_t learning_samples(std::uint64_t n, double beta);

/// Plain Monte Carlo, one repetition: n draws from the base density,
/// p_hat = critical / n.
EstimateReport mc_estimate(const SampleSpace& space, const CriticalityPredicate& predicate,
                           std::uint64_t n, const RandomStream& stream, Exec exec = {});

struct LearnedGrid {
  GridPartition partition;
  std::uint64_t critical_total = 0;
  std::vector<std::uint64_t> critical_per_cell;
};

/// Learning phase of grid importance sampling. Draws n_learn points from the
/// base density, bins the critical ones by cell, normalizes by the critical
/// total, adds |Gaussian(0, noise_scale)| to every cell and renormalizes.
/// Sample i uses stream.child(0).child(i); the noise uses stream.child(1).
LearnedGrid learn_grid_density(const GridPartition& partition, const CriticalityPredicate& predicate,
                               std::uint64_t n_learn, double noise_scale, const RandomStream& stream,
                               Exec exec = {});

struct IsResult {
  double p_hat = 0.0;
  std::uint64_t r = 0;
  std::vector<std::uint64_t> allocation;
  std::vector<std::uint64_t> critical_per_cell;
};

/// Importance phase on r = n - learning_samples(n, beta) draws: allocates r*g
/// draws to each cell, counts criticals |C|_g, accumulates |C|_g * A / g in
/// cell order with A the cell's base mass, and divides by r. The g in the
/// weight is the realized share allocation_g / r, i.e. the learned density up
/// to allocation rounding.
/// Throws DiagnosticError if the densities are invalid or p_hat exceeds 1.
IsResult is_estimate(const GridPartition& learned, const CriticalityPredicate& predicate,
                     std::uint64_t n, double beta, const RandomStream& stream, Exec exec = {},
                     InCellSampling mode = InCellSampling::kUniform);

struct GridIsSettings {
  int edges_per_side = 10;
  double beta = 0.2;
  std::optional<double> noise_scale;  // default_noise_scale() when unset
};

/// One full grid-IS repetition: learn on stream.child(0), estimate on stream.child(1).
EstimateReport grid_is_estimate(const SampleSpace& space, const CriticalityPredicate& predicate,
                                std::uint64_t n, const GridIsSettings& settings,
                                const RandomStream& stream, Exec exec = {});

/// R independent repetitions on substreams (master_seed, [method tag, repetition]).
EstimateReport repeat_mc(const SampleSpace& space, const CriticalityPredicate& predicate,
                         std::uint64_t n, int repetitions, std::uint64_t master_seed, Exec exec = {});
EstimateReport repeat_grid_is(const SampleSpace& space, const CriticalityPredicate& predicate,
                              std::uint64_t n, const GridIsSettings& settings, int repetitions,
                              std::uint64_t master_seed, Exec exec = {});

/// Paired MC / grid-IS comparison with R >= 2 repetitions each.
std::pair<EstimateReport, EstimateReport> vae_compare(const SampleSpace& space,
                                                      const CriticalityPredicate& predicate,
                                                      std::uint64_t n, const GridIsSettings& settings,
                                                      int repetitions, std::uint64_t master_seed,
                                                      Exec exec = {});

}  // namespace hrisk
