// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hrisk/kernels.hpp"
#include "hrisk/presets.hpp"

using namespace hrisk;

namespace {

const EstimationProblem& normal_problem() {
  static const EstimationProblem p = benchmark_problem("normal");
  return p;
}

std::vector<TrialJob> sweep_jobs(std::size_t count) {
  std::vector<TrialJob> jobs;
  jobs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    jobs.push_back({{static_cast<int>(i % 10), 0.01 * static_cast<double>(i % 11) - 0.05, 0.0},
                    RandomStream(1, {i})});
  }
  return jobs;
}

void BM_CountCriticalSerial(benchmark::State& state) {
  const auto& p = normal_problem();
  const RandomStream family(1, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_critical_serial(p.space, p.predicate, 100000, family));
  }
}

void BM_CountCriticalParallel(benchmark::State& state) {
  const auto& p = normal_problem();
  const RandomStream family(1, {});
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::count_critical_parallel(p.space, p.predicate, 100000, family, workers));
  }
}

void BM_InCellCriticalSerial(benchmark::State& state) {
  const auto& p = normal_problem();
  GridPartition grid(p.space, 10);
  const std::vector<std::uint64_t> alloc(grid.cell_count(), 1000);
  const RandomStream family(1, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::in_cell_critical_serial(grid, alloc, p.predicate, family, InCellSampling::kUniform));
  }
}

void BM_InCellCriticalParallel(benchmark::State& state) {
  const auto& p = normal_problem();
  GridPartition grid(p.space, 10);
  const std::vector<std::uint64_t> alloc(grid.cell_count(), 1000);
  const RandomStream family(1, {});
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::in_cell_critical_parallel(grid, alloc, p.predicate, family, InCellSampling::kUniform, workers));
  }
}

void BM_RunTrialsSerial(benchmark::State& state) {
  const ScenarioConfig cfg = experiment_preset("scenario-a").scenario;
  const auto jobs = sweep_jobs(20000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::run_trials_serial(cfg, jobs));
}

void BM_RunTrialsParallel(benchmark::State& state) {
  const ScenarioConfig cfg = experiment_preset("scenario-a").scenario;
  const auto jobs = sweep_jobs(20000);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::run_trials_parallel(cfg, jobs, workers));
}

}  // namespace

BENCHMARK(BM_CountCriticalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountCriticalParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_InCellCriticalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InCellCriticalParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunTrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunTrialsParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
