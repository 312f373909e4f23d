#include "hrisk/kernels.hpp"

#include <algorithm>
#include <omp.h>

namespace hrisk {

int Exec::resolved() const { return workers > 0 ? workers : std::max(1, omp_get_max_threads()); }

namespace kernels {
namespace {

void place_in_cell(const GridPartition& partition, std::size_t cell, std::uint64_t j, std::uint64_t n,
                   InCellSampling mode, RandomStream& stream, std::span<double> point) {
  if (mode == InCellSampling::kLattice) {
    partition.lattice_point_in_cell(cell, j, n, point);
  } else {
    partition.sample_in_cell(cell, stream, point);
  }
}

}  // namespace

std::uint64_t count_critical_serial(const SampleSpace& space, const CriticalityPredicate& predicate,
                                    std::uint64_t n, const RandomStream& family) {
  std::vector<double> point(static_cast<std::size_t>(space.dimension()));
  std::uint64_t critical = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream stream = family.child(i);
    space.sample(stream, point);
    if (predicate(point, stream)) ++critical;
  }
  return critical;
}

std::uint64_t count_critical_parallel(const SampleSpace& space, const CriticalityPredicate& predicate,
                                      std::uint64_t n, const RandomStream& family, int workers) {
  const auto count = static_cast<std::int64_t>(n);
  std::uint64_t critical = 0;
#pragma omp parallel num_threads(workers) reduction(+ : critical)
  {
    std::vector<double> point(static_cast<std::size_t>(space.dimension()));
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      RandomStream stream = family.child(static_cast<std::uint64_t>(i));
      space.sample(stream, point);
      if (predicate(point, stream)) ++critical;
    }
  }
  return critical;
}

std::vector<std::uint64_t> critical_cells_serial(const GridPartition& partition,
                                                 const CriticalityPredicate& predicate,
                                                 std::uint64_t n, const RandomStream& family) {
  std::vector<std::uint64_t> cells(partition.cell_count(), 0);
  std::vector<double> point(static_cast<std::size_t>(partition.space().dimension()));
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream stream = family.child(i);
    partition.space().sample(stream, point);
    if (predicate(point, stream)) ++cells[partition.cell_index(point)];
  }
  return cells;
}

std::vector<std::uint64_t> critical_cells_parallel(const GridPartition& partition,
                                                   const CriticalityPredicate& predicate,
                                                   std::uint64_t n, const RandomStream& family,
                                                   int workers) {
  constexpr std::int64_t kNotCritical = -1;
  const auto count = static_cast<std::int64_t>(n);
  std::vector<std::int64_t> hit(n, kNotCritical);
#pragma omp parallel num_threads(workers)
  {
    std::vector<double> point(static_cast<std::size_t>(partition.space().dimension()));
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      RandomStream stream = family.child(static_cast<std::uint64_t>(i));
      partition.space().sample(stream, point);
      if (predicate(point, stream)) hit[i] = static_cast<std::int64_t>(partition.cell_index(point));
    }
  }
  std::vector<std::uint64_t> cells(partition.cell_count(), 0);
  for (std::int64_t h : hit) {
    if (h != kNotCritical) ++cells[static_cast<std::size_t>(h)];
  }
  return cells;
}

std::vector<std::uint64_t> in_cell_critical_serial(const GridPartition& partition,
                                                   std::span<const std::uint64_t> allocation,
                                                   const CriticalityPredicate& predicate,
                                                   const RandomStream& family, InCellSampling mode) {
  std::vector<std::uint64_t> critical(partition.cell_count(), 0);
  std::vector<double> point(static_cast<std::size_t>(partition.space().dimension()));
  for (std::size_t g = 0; g < partition.cell_count(); ++g) {
    const RandomStream cell_family = family.child(g);
    for (std::uint64_t j = 0; j < allocation[g]; ++j) {
      RandomStream stream = cell_family.child(j);
      place_in_cell(partition, g, j, allocation[g], mode, stream, point);
      if (predicate(point, stream)) ++critical[g];
    }
  }
  return critical;
}

std::vector<std::uint64_t> in_cell_critical_parallel(const GridPartition& partition,
                                                     std::span<const std::uint64_t> allocation,
                                                     const CriticalityPredicate& predicate,
                                                     const RandomStream& family, InCellSampling mode,
                                                     int workers) {
  // Flatten (cell, draw) pairs so one heavily loaded cell still spreads across workers.
  std::vector<std::uint64_t> offsets(allocation.size() + 1, 0);
  for (std::size_t g = 0; g < allocation.size(); ++g) offsets[g + 1] = offsets[g] + allocation[g];
  const auto total = static_cast<std::int64_t>(offsets.back());
  std::vector<std::uint8_t> label(offsets.back(), 0);

#pragma omp parallel num_threads(workers)
  {
    std::vector<double> point(static_cast<std::size_t>(partition.space().dimension()));
#pragma omp for schedule(static)
    for (std::int64_t flat = 0; flat < total; ++flat) {
      const auto f = static_cast<std::uint64_t>(flat);
      const auto g = static_cast<std::size_t>(
          std::upper_bound(offsets.begin(), offsets.end(), f) - offsets.begin() - 1);
      const std::uint64_t j = f - offsets[g];
      RandomStream stream = family.child(g).child(j);
      place_in_cell(partition, g, j, allocation[g], mode, stream, point);
      label[f] = predicate(point, stream) ? 1 : 0;
    }
  }

  std::vector<std::uint64_t> critical(partition.cell_count(), 0);
  for (std::size_t g = 0; g < allocation.size(); ++g) {
    for (std::uint64_t f = offsets[g]; f < offsets[g + 1]; ++f) critical[g] += label[f];
  }
  return critical;
}

std::vector<TrialOutcome> run_trials_serial(const ScenarioConfig& config, std::span<const TrialJob> jobs) {
  std::vector<TrialOutcome> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(run_trial(config, job.params, job.stream));
  return out;
}

std::vector<TrialOutcome> run_trials_parallel(const ScenarioConfig& config, std::span<const TrialJob> jobs,
                                              int workers) {
  std::vector<TrialOutcome> out(jobs.size());
  const auto count = static_cast<std::int64_t>(jobs.size());
  // Trial lengths vary with the delay, so hand out work in small chunks.
#pragma omp parallel for num_threads(workers) schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    out[i] = run_trial(config, jobs[i].params, jobs[i].stream);
  }
  return out;
}

}  // namespace kernels

std::uint64_t count_critical(const SampleSpace& space, const CriticalityPredicate& predicate,
                             std::uint64_t n, const RandomStream& family, Exec exec) {
  return exec.serial() ? kernels::count_critical_serial(space, predicate, n, family)
                       : kernels::count_critical_parallel(space, predicate, n, family, exec.resolved());
}

std::vector<std::uint64_t> critical_cells(const GridPartition& partition,
                                          const CriticalityPredicate& predicate, std::uint64_t n,
                                          const RandomStream& family, Exec exec) {
  return exec.serial()
             ? kernels::critical_cells_serial(partition, predicate, n, family)
             : kernels::critical_cells_parallel(partition, predicate, n, family, exec.resolved());
}

std::vector<std::uint64_t> in_cell_critical(const GridPartition& partition,
                                            std::span<const std::uint64_t> allocation,
                                            const CriticalityPredicate& predicate,
                                            const RandomStream& family, InCellSampling mode, Exec exec) {
  return exec.serial() ? kernels::in_cell_critical_serial(partition, allocation, predicate, family, mode)
                       : kernels::in_cell_critical_parallel(partition, allocation, predicate, family,
                                                            mode, exec.resolved());
}

std::vector<TrialOutcome> run_trials(const ScenarioConfig& config, std::span<const TrialJob> jobs, Exec exec) {
  return exec.serial() ? kernels::run_trials_serial(config, jobs)
                       : kernels::run_trials_parallel(config, jobs, exec.resolved());
}

}  // namespace hrisk
