#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hrisk/random_stream.hpp"
#include "hrisk/sample_space.hpp"
#include "hrisk/scenario.hpp"

namespace hrisk {

/// Labels a sample point as critical. Must be a pure function of the point
/// and the draws it takes from the stream, and safe to call concurrently.
using CriticalityPredicate = std::function<bool(std::span<const double> point, RandomStream& stream)>;

/// Worker count for the compute kernels: 1 selects the serial reference
/// path, 0 uses the OpenMP default.
struct Exec {
  int workers = 0;

  [[nodiscard]] int resolved() const;
  [[nodiscard]] bool serial() const { return resolved() == 1; }
};

struct TrialJob {
  TrialParams params;
  RandomStream stream;
};

/// Data-parallel kernels. Each *_parallel function returns exactly what its
/// *_serial reference returns, for any worker count: per-sample work is
/// addressed by substream, and reductions are over integers or run in
/// index order.
namespace kernels {

/// Sample i draws its point from the base density on family.child(i) and
/// hands the same stream on to the predicate. Returns the critical count.
std::uint64_t count_critical_serial(const SampleSpace& space, const CriticalityPredicate& predicate,
                                    std::uint64_t n, const RandomStream& family);
std::uint64_t count_critical_parallel(const SampleSpace& space, const CriticalityPredicate& predicate,
                                      std::uint64_t n, const RandomStream& family, int workers);

/// Like count_critical, but bins each critical sample into its grid cell.
std::vector<std::uint64_t> critical_cells_serial(const GridPartition& partition,
                                                 const CriticalityPredicate& predicate,
                                                 std::uint64_t n, const RandomStream& family);
std::vector<std::uint64_t> critical_cells_parallel(const GridPartition& partition,
                                                   const CriticalityPredicate& predicate,
                                                   std::uint64_t n, const RandomStream& family,
                                                   int workers);

/// Draw j of cell g is placed with family.child(g).child(j). Returns the
/// critical count per cell.
std::vector<std::uint64_t> in_cell_critical_serial(const GridPartition& partition,
                                                   std::span<const std::uint64_t> allocation,
                                                   const CriticalityPredicate& predicate,
                                                   const RandomStream& family, InCellSampling mode);
std::vector<std::uint64_t> in_cell_critical_parallel(const GridPartition& partition,
                                                     std::span<const std::uint64_t> allocation,
                                                     const CriticalityPredicate& predicate,
                                                     const RandomStream& family, InCellSampling mode,
                                                     int workers);

std::vector<TrialOutcome> run_trials_serial(const ScenarioConfig& config, std::span<const TrialJob> jobs);
std::vector<TrialOutcome> run_trials_parallel(const ScenarioConfig& config, std::span<const TrialJob> jobs,
                                              int workers);

}  // namespace kernels

std::uint64_t count_critical(const SampleSpace& space, const CriticalityPredicate& predicate,
                             std::uint64_t n, const RandomStream& family, Exec exec);
std::vector<std::uint64_t> critical_cells(const GridPartition& partition,
                                          const CriticalityPredicate& predicate, std::uint64_t n,
                                          const RandomStream& family, Exec exec);
std::vector<std::uint64_t> in_cell_critical(const GridPartition& partition,
                                            std::span<const std::uint64_t> allocation,
                                            const CriticalityPredicate& predicate,
                                            const RandomStream& family, InCellSampling mode, Exec exec);
std::vector<TrialOutcome> run_trials(const ScenarioConfig& config, std::span<const TrialJob> jobs, Exec exec);

}  // namespace hrisk
