// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hrisk/cli.hpp"
#include "hrisk/estimator.hpp"
#include "hrisk/presets.hpp"
#include "hrisk/risk.hpp"
#include "oracles.hpp"

using namespace hrisk;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hrisk");
  args.push_back("--quiet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(HRISK_TEST_TMP) / "acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

struct BoxComparison {
  EstimateReport mc;
  EstimateReport is;
  double seconds = 0.0;
  [[nodiscard]] double ratio() const { return *is.vae / *mc.vae; }
};

const BoxComparison& box_comparison(const std::string& name) {
  static std::map<std::string, BoxComparison> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const auto problem = benchmark_problem(name);
  const auto t0 = Clock::now();
  auto [mc, is] = vae_compare(problem.space, problem.predicate, 30000, GridIsSettings{10, 0.2, std::nullopt}, 20, kSeed);
  BoxComparison c{std::move(mc), std::move(is), seconds_since(t0)};
  return cache.emplace(name, std::move(c)).first->second;
}

Outcome unbiasedness() {
  const auto& c = box_comparison("box-small");
  const double se_mc = std::sqrt(*c.mc.vae / 20.0);
  const double se_is = std::sqrt(*c.is.vae / 20.0);
  const bool ok = std::abs(c.mc.p_hat - 0.01) <= 4 * se_mc && std::abs(c.is.p_hat - 0.01) <= 4 * se_is &&
                  c.seconds < 10.0;
  return {ok, fmt::format("MC {:.6f} (4se {:.2e}), GridIS {:.6f} (4se {:.2e}), {:.2f} s", c.mc.p_hat, 4 * se_mc,
                          c.is.p_hat, 4 * se_is, c.seconds)};
}

Outcome variance_reduction() {
  const auto& c = box_comparison("box-small");
  return {*c.is.vae <= 0.7 * *c.mc.vae,
          fmt::format("VAE GridIS {:.3e} vs MC {:.3e}, ratio {:.3f} (limit 0.7)", *c.is.vae, *c.mc.vae, c.ratio())};
}

Outcome variance_non_reduction() {
  const auto& small = box_comparison("box-small");
  const auto& large = box_comparison("box-large");
  return {large.ratio() > small.ratio(),
          fmt::format("ratio large-region {:.3f} > small-region {:.3f}", large.ratio(), small.ratio())};
}

Outcome exact_oracle() {
  // [0, 1] in 64 fine bins; the critical set is a union of fine bins. Grid
  // e = 4 with dyadic densities and r = 128 gives the exact allocation
  // (64, 32, 16, 16), and lattice placement visits every fine bin equally
  // often within each cell.
  GridPartition grid(SampleSpace({{0.0, 1.0}}), 4);
  grid.set_densities({0.5, 0.25, 0.125, 0.125});
  RandomStream pick(kSeed, {4});
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<bool> in_set(64);
    for (int b = 0; b < 64; ++b) in_set[b] = pick.uniform() < 0.3;
    const CriticalityPredicate pred = [in_set](std::span<const double> p, RandomStream&) {
      const int bin = std::min(63, static_cast<int>(std::floor(p[0] * 64.0)));
      return static_cast<bool>(in_set[bin]);
    };
    // Brute force over the discretized space.
    int hits = 0;
    for (int b = 0; b < 64; ++b) hits += pred(std::vector<double>{(b + 0.5) / 64.0}, pick) ? 1 : 0;
    const double brute = hits / 64.0;
    const auto res = is_estimate(grid, pred, 128, 0.0, RandomStream(kSeed, {5}), Exec{}, InCellSampling::kLattice);
    if (res.allocation != std::vector<std::uint64_t>{64, 32, 16, 16}) {
      return {false, "allocation was not exact"};
    }
    if (res.p_hat != brute) {
      return {false, fmt::format("trial {}: estimate {} != brute force {}", trial, res.p_hat, brute)};
    }
    ++checked;
  }
  return {true, fmt::format("{} random critical sets, estimate == brute force bit for bit", checked)};
}

Outcome density_invariants() {
  RandomStream pick(kSeed, {5});
  double worst_sum = 0.0;
  double smallest = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dims = 1 + static_cast<int>(pick.uniform_int(0, 2));
    std::vector<Interval> bounds;
    std::vector<Interval> box;
    for (int d = 0; d < dims; ++d) {
      const double lo = pick.uniform(-5.0, 5.0);
      const double hi = lo + pick.uniform(0.1, 3.0);
      bounds.push_back({lo, hi});
      const double a = pick.uniform(lo, hi);
      const double b = pick.uniform(lo, hi);
      box.push_back({std::min(a, b), std::max(a, b)});
    }
    CriticalityPredicate pred;
    switch (trial % 4) {
      case 0: pred = box_predicate(box); break;
      case 1: pred = [](std::span<const double>, RandomStream&) { return false; }; break;
      case 2: pred = [](std::span<const double>, RandomStream&) { return true; }; break;
      default: {
        const double q = pick.uniform();
        pred = [q](std::span<const double>, RandomStream& s) { return s.uniform() < q; };
      }
    }
    const int e = 1 + static_cast<int>(pick.uniform_int(0, 11));
    GridPartition grid(SampleSpace(bounds), e);
    const auto n_learn = static_cast<std::uint64_t>(pick.uniform_int(1, 2000));
    const double noise = default_noise_scale(grid.cell_count()) * pick.uniform(0.01, 10.0);
    const auto learned = learn_grid_density(grid, pred, n_learn, noise, RandomStream(kSeed, {6, static_cast<std::uint64_t>(trial)}));
    const auto g = learned.partition.densities();
    double sum = 0.0;
    for (double v : g) {
      sum += v;
      smallest = std::min(smallest, v);
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  return {worst_sum <= 1e-9 && smallest > 0.0,
          fmt::format("max |sum - 1| = {:.2e}, min density = {:.3e}", worst_sum, smallest)};
}

oracle::CorridorCase corridor_case(const ScenarioConfig& s, double offset, int delay) {
  return {s.geometry.initial_separation + s.geometry.contact_radius + offset, s.d_threshold, s.human_speed_vH,
          s.robot_speed, s.timestep_T, delay, s.horizon_K};
}

Outcome scenario_saturation() {
  const ExperimentConfig cfg = experiment_preset("scenario-a-analytic");
  const ScenarioConfig& s = cfg.scenario;
  const int cutoff = oracle::corridor_cutoff_steps(s.d_threshold, s.human_speed_vH, s.robot_speed, s.timestep_T);
  int mismatches = 0;
  bool saturated = true;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const RandomStream stream = sweep_trial_stream(kSeed, t);
    RandomStream copy = stream;
    const double offset = s.geometry.start_jitter * copy.uniform();
    for (int n = 0; n <= 12; ++n) {
      const bool sim = run_trial(s, {n, 0.0, 0.0}, stream).collided;
      if (sim != oracle::corridor_collides(corridor_case(s, offset, n))) ++mismatches;
      if (n >= cutoff && !sim) saturated = false;
    }
  }
  // Benign geometry: immediate reaction with a robot that retreats faster
  // than the human approaches.
  const ScenarioConfig& benign = s;
  std::uint64_t benign_hits = 0;
  bool oracle_benign = true;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const RandomStream stream = sweep_trial_stream(kSeed, t);
    RandomStream copy = stream;
    const double offset = benign.geometry.start_jitter * copy.uniform();
    if (run_trial(benign, {0, 0.0, 0.0}, stream).collided) ++benign_hits;
    if (oracle::corridor_collides(corridor_case(benign, offset, 0))) oracle_benign = false;
  }
  const bool ok = mismatches == 0 && saturated && benign_hits == 0 && oracle_benign;
  return {ok, fmt::format("N* = {} steps ({:g} s); p = 1 for N >= N*: {}; p(N = 0) = {}/200; oracle mismatches {}",
                          cutoff, cutoff * s.timestep_T, saturated ? "yes" : "no", benign_hits, mismatches)};
}

Outcome delay_monotonicity() {
  const ExperimentConfig cfg = experiment_preset("scenario-a");
  int violations = 0;
  int collisions = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const RandomStream trial(kSeed, {7, t});
    RandomStream draw = trial.child(0);
    const SpatialParams sp = sample_spatial_params(cfg.uncertainty.spatial, draw);
    bool previous = false;
    for (int n = 0; n <= 9; ++n) {
      const bool hit = run_trial(cfg.scenario, {n, sp.delta_d0, sp.c}, trial.child(1)).collided;
      if (previous && !hit) ++violations;
      collisions += hit ? 1 : 0;
      previous = hit;
    }
  }
  return {violations == 0, fmt::format("1000 (trial, N) pairs, {} collisions, {} violations", collisions, violations)};
}

Outcome severity_contract() {
  RandomStream pick(kSeed, {8});
  const char* presets[] = {"scenario-a", "scenario-b", "scenario-c"};
  int violations = 0;
  int collided = 0;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    ExperimentConfig cfg = experiment_preset(presets[t % 3]);
    cfg.scenario.F_max = pick.uniform(50.0, 300.0);
    cfg.scenario.effective_mass_mu = pick.uniform(1.0, 40.0);
    const int n = static_cast<int>(pick.uniform_int(0, 20));
    const SpatialParams sp = sample_spatial_params(cfg.uncertainty.spatial, pick);
    const TrialOutcome o = run_trial(cfg.scenario, {n, sp.delta_d0, sp.c}, RandomStream(kSeed, {9, t}));
    const double expected = o.collided ? o.collision_force_Fc / cfg.scenario.F_max : 0.0;
    const bool zero_iff_safe = (o.severity == 0.0) == !o.collided;
    const double fc = o.collided ? *o.impact_speed * std::sqrt(cfg.scenario.contact_stiffness_k *
                                                               cfg.scenario.effective_mass_mu)
                                 : 0.0;
    if (!zero_iff_safe || o.severity != expected || std::abs(o.collision_force_Fc - fc) > 1e-9 * (1.0 + fc)) {
      ++violations;
    }
    collided += o.collided ? 1 : 0;
  }
  return {violations == 0 && collided > 0 && collided < 10000,
          fmt::format("10000 trials, {} collisions, {} contract violations", collided, violations)};
}

Outcome sweep_shape() {
  const fs::path out = scratch("sweep_shape");
  const ExperimentConfig cfg = experiment_preset("scenario-a");
  const auto t0 = Clock::now();
  const int rc = run_cli({"sweep", "--preset", "scenario-a", "--seed", std::to_string(kSeed), "--out", out.string()});
  const double secs = seconds_since(t0);
  if (rc != 0) return {false, fmt::format("sweep exited with {}", rc)};

  const auto surface = nlohmann::json::parse(slurp(out / "surface.json"));
  const std::size_t combos = surface["constellations"].size();
  std::istringstream table(slurp(out / "surface_table.csv"));
  std::string line;
  std::getline(table, line);  // provenance
  std::getline(table, line);  // column labels
  const std::size_t columns = split(line, ',').size() - 1;
  int rows = 0;
  int values = 0;
  bool in_range = true;
  while (std::getline(table, line)) {
    ++rows;
    const auto fields = split(line, ',');
    if (fields.size() != columns + 1) in_range = false;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] == "N/A") continue;
      const double p = std::stod(fields[i]);
      if (!(p >= 0.0 && p <= 1.0)) in_range = false;
      ++values;
    }
  }
  const bool ok = combos == 2500 && rows == 10 && values > 0 && in_range && secs < 60.0 &&
                  cfg.scenario.horizon_K <= 500;
  return {ok, fmt::format("{} constellations, table {} x {} ({} values in [0,1]: {}), {:.2f} s", combos, rows,
                          columns, values, in_range ? "yes" : "no", secs)};
}

Outcome determinism() {
  const fs::path a = scratch("det_w1");
  const fs::path b = scratch("det_w8");
  const std::string seed = std::to_string(kSeed);
  if (run_cli({"sweep", "--preset", "scenario-c", "--seed", seed, "--workers", "1", "--out", a.string()}) != 0 ||
      run_cli({"sweep", "--preset", "scenario-c", "--seed", seed, "--workers", "8", "--out", b.string()}) != 0) {
    return {false, "sweep failed"};
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      return {false, fmt::format("{} differs", entry.path().filename().string())};
    }
    ++files;
  }
  return {files >= 5, fmt::format("{} CSV files byte-identical for --workers 1 and 8", files)};
}

Outcome safety_evaluation() {
  const ExperimentConfig cfg = experiment_preset("scenario-a-analytic");
  const ScenarioConfig& s = cfg.scenario;
  const int cutoff = oracle::corridor_cutoff_steps(s.d_threshold, s.human_speed_vH, s.robot_speed, s.timestep_T);
  const double limit = cutoff * s.timestep_T;

  std::vector<std::set<std::size_t>> regions;
  std::string tolerated;
  bool below = true;
  for (double lambda : {0.01, 0.05, 0.1, 0.5}) {
    const fs::path dir = scratch(fmt::format("safety_{}", lambda));
    const fs::path config = dir / "config.json";
    std::ofstream(config) << nlohmann::json{{"safety", {{"lambda", lambda}}}}.dump();
    if (run_cli({"evaluate", "--preset", "scenario-a-analytic", "--config", config.string(), "--seed",
                 std::to_string(kSeed), "--out", (dir / "out").string()}) != 0) {
      return {false, fmt::format("evaluate failed for lambda {}", lambda)};
    }
    const auto doc = nlohmann::json::parse(slurp(dir / "out" / "safety.json"));
    std::set<std::size_t> region;
    for (const auto& c : doc["admissible_region"]) region.insert(c["index"].get<std::size_t>());
    regions.push_back(region);
    const auto& ut = doc["tolerated_u_t_max"];
    if (ut.is_null() || !(ut.get<double>() < limit)) below = false;
    tolerated += fmt::format(" {}:{}", lambda, ut.is_null() ? std::string("none") : fmt::format("{}", ut.get<double>()));
  }
  bool nested = true;
  for (std::size_t i = 1; i < regions.size(); ++i) {
    nested = nested && std::includes(regions[i].begin(), regions[i].end(), regions[i - 1].begin(), regions[i - 1].end());
  }
  return {below && nested, fmt::format("N*T = {:g} s; tolerated u_t by lambda{}; regions {} {} {} {} nested: {}", limit,
                                       tolerated, regions[0].size(), regions[1].size(), regions[2].size(),
                                       regions[3].size(), nested ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Unbiasedness on the analytic box", unbiasedness},
      {"Variance reduction on the small-region box", variance_reduction},
      {"Variance non-reduction on the large-region box", variance_non_reduction},
      {"Exact-oracle equivalence on a discretized 1-D space", exact_oracle},
      {"Grid-density invariants", density_invariants},
      {"Scenario saturation against the closed-form oracle", scenario_saturation},
      {"Delay monotonicity", delay_monotonicity},
      {"Severity contract", severity_contract},
      {"Sweep shape (10 x 10 x 25)", sweep_shape},
      {"Determinism across worker counts", determinism},
      {"Safety evaluation", safety_evaluation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} {:2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
