#include "hrisk/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hrisk/config.hpp"
#include "hrisk/errors.hpp"
#include "hrisk/estimator.hpp"
#include "hrisk/kernels.hpp"
#include "hrisk/presets.hpp"
#include "hrisk/report.hpp"
#include "hrisk/risk.hpp"
#include "hrisk/version.hpp"

namespace hrisk::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSimulateTag = 0x5349;

struct CommonOptions {
  bool quiet = false;
  std::string config_path;
  std::string preset;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::optional<std::string> method;
  std::optional<std::uint64_t> samples;
  std::optional<int> repetitions;
  std::optional<std::uint64_t> trials;
};

struct Context {
  ExperimentConfig config;
  OutputHeader header;
  Exec exec;
  fs::path out_dir;
};

bool g_quiet = false;

template <typename... Args>
void say(fmt::format_string<Args...> format, Args&&... args) {
  if (!g_quiet) fmt::print(format, std::forward<Args>(args)...);
}

Context build_context(const CommonOptions& opts) {
  g_quiet = opts.quiet;
  ExperimentConfig config;
  if (!opts.preset.empty()) {
    if (is_experiment_preset(opts.preset)) {
      config = experiment_preset(opts.preset);
    } else if (is_benchmark_name(opts.preset)) {
      config.estimator.benchmark = opts.preset;
    } else {
      throw ConfigError(fmt::format("unknown preset '{}'", opts.preset));
    }
  }
  if (!opts.config_path.empty()) config = load_config_file(opts.config_path, config);
  if (opts.seed) config.master_seed = *opts.seed;
  if (opts.out) config.output_dir = *opts.out;
  if (opts.samples) config.estimator.n = *opts.samples;
  if (opts.repetitions) config.estimator.repetitions = *opts.repetitions;
  if (opts.trials) {
    config.simulate.trials = *opts.trials;
    config.sweep.trials_per_constellation = *opts.trials;
  }
  if (opts.workers < 0) throw ConfigError("--workers must be >= 0");
  config.validate();

  Context ctx;
  ctx.config = config;
  ctx.header = OutputHeader{config.master_seed, config_hash(config), std::string(kVersion)};
  ctx.exec = Exec{opts.workers};
  ctx.out_dir = config.output_dir;
  fs::create_directories(ctx.out_dir);
  std::ofstream resolved(ctx.out_dir / "config_resolved.json");
  resolved << to_json(config).dump(2) << '\n';
  return ctx;
}

void require_nondegenerate(const ScenarioConfig& scenario) {
  if (!nominal_paths_approach(scenario)) {
    throw ConfigError(
        "degenerate scenario: without a reaction the nominal paths never come within d_threshold, "
        "so no dangerous event can occur");
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  body(out);
  if (!out) throw std::runtime_error(fmt::format("error while writing {}", path.string()));
  say("wrote {}\n", path.string());
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

std::string opt_text(const std::optional<double>& v) { return v ? format_number(*v) : std::string("undefined"); }

int cmd_simulate(const CommonOptions& opts) {
  Context ctx = build_context(opts);
  const ExperimentConfig& cfg = ctx.config;
  require_nondegenerate(cfg.scenario);

  std::vector<TrialJob> jobs;
  jobs.reserve(cfg.simulate.trials);
  for (std::uint64_t t = 0; t < cfg.simulate.trials; ++t) {
    RandomStream stream(cfg.master_seed, {kSimulateTag, t});
    TrialParams params = cfg.simulate.constellation;
    if (cfg.simulate.sample_uncertainty) {
      RandomStream draw = stream.child(0);
      params.delay_steps = sample_delay_steps(cfg.uncertainty.temporal, draw);
      const SpatialParams sp = sample_spatial_params(cfg.uncertainty.spatial, draw);
      params.delta_d0 = sp.delta_d0;
      params.c = sp.c;
    }
    jobs.push_back(TrialJob{params, stream.child(1)});
  }
  const std::vector<TrialOutcome> outcomes = run_trials(cfg.scenario, jobs, ctx.exec);

  std::uint64_t collisions = 0;
  std::uint64_t dangerous = 0;
  double severity_sum = 0.0;
  for (const auto& o : outcomes) {
    if (o.collided) {
      ++collisions;
      severity_sum += o.severity;
    }
    if (is_dangerous(cfg.scenario, o)) ++dangerous;
  }
  write_file(ctx.out_dir / "trials.csv", [&](std::ostream& out) { write_trials_csv(out, ctx.header, outcomes); });

  const double n = static_cast<double>(outcomes.size());
  say("scenario {} trials={} collisions={} dangerous={} p_hat={}\n", to_string(cfg.scenario.kind),
             outcomes.size(), collisions, dangerous, outcomes.empty() ? 0.0 : dangerous / n);
  if (collisions > 0) say("mean severity given collision={}\n", severity_sum / static_cast<double>(collisions));
  return kExitOk;
}

GridIsSettings grid_settings(const EstimatorSettings& est) {
  return GridIsSettings{est.edges_per_side, est.beta, est.noise_scale};
}

EstimationProblem problem_for(const ExperimentConfig& cfg) {
  if (!cfg.estimator.benchmark) require_nondegenerate(cfg.scenario);
  return make_problem(cfg);
}

int cmd_estimate(const CommonOptions& opts) {
  Context ctx = build_context(opts);
  const ExperimentConfig& cfg = ctx.config;
  const Method method = method_from_string(opts.method.value_or("grid-is"));
  const EstimationProblem problem = problem_for(cfg);
  const auto& est = cfg.estimator;

  const EstimateReport report =
      method == Method::kMc
          ? repeat_mc(problem.space, problem.predicate, est.n, est.repetitions, cfg.master_seed, ctx.exec)
          : repeat_grid_is(problem.space, problem.predicate, est.n, grid_settings(est), est.repetitions,
                           cfg.master_seed, ctx.exec);

  write_json(ctx.out_dir / "estimate.json", estimate_to_json(report, ctx.header, problem.name, problem.true_probability));
  write_file(ctx.out_dir / "estimate.csv", [&](std::ostream& out) {
    write_estimate_summary_csv(out, ctx.header, std::span<const EstimateReport>(&report, 1));
  });
  say("problem {} method {} n={} R={} p_hat={} vae={}\n", problem.name, to_string(report.method),
             report.samples_per_repetition, report.per_repetition.size(), format_number(report.p_hat),
             opt_text(report.vae));
  if (problem.true_probability) say("true probability {}\n", format_number(*problem.true_probability));
  for (const auto& note : report.notes) say("note: {}\n", note);
  return kExitOk;
}

int cmd_compare(const CommonOptions& opts) {
  Context ctx = build_context(opts);
  const ExperimentConfig& cfg = ctx.config;
  const auto& est = cfg.estimator;
  if (est.repetitions < 2) {
    throw ConfigError("compare needs estimator.repetitions >= 2 (the VAE is undefined for a single repetition)");
  }
  const EstimationProblem problem = problem_for(cfg);
  const auto [mc, is] =
      vae_compare(problem.space, problem.predicate, est.n, grid_settings(est), est.repetitions, cfg.master_seed, ctx.exec);
  const std::vector<EstimateReport> reports{mc, is};

  write_file(ctx.out_dir / "compare.csv",
             [&](std::ostream& out) { write_estimate_summary_csv(out, ctx.header, reports); });
  write_file(ctx.out_dir / "compare_repetitions.csv",
             [&](std::ostream& out) { write_repetitions_csv(out, ctx.header, reports); });
  nlohmann::json doc;
  doc["meta"] = ctx.header.to_json();
  doc["mc"] = estimate_to_json(mc, ctx.header, problem.name, problem.true_probability);
  doc["grid_is"] = estimate_to_json(is, ctx.header, problem.name, problem.true_probability);
  if (mc.vae && is.vae && *mc.vae > 0.0) doc["vae_ratio_is_over_mc"] = *is.vae / *mc.vae;
  write_json(ctx.out_dir / "compare.json", doc);

  say("problem {} n={} R={}\n", problem.name, est.n, est.repetitions);
  say("mc      p_hat={} vae={}\n", format_number(mc.p_hat), opt_text(mc.vae));
  say("grid-is p_hat={} vae={}\n", format_number(is.p_hat), opt_text(is.vae));
  if (problem.true_probability) say("true probability {}\n", format_number(*problem.true_probability));
  return kExitOk;
}

RiskSurface run_sweep(const Context& ctx) {
  const ExperimentConfig& cfg = ctx.config;
  require_nondegenerate(cfg.scenario);
  const SweepGrid grid = resolve_sweep_grid(cfg);
  if (grid.constellation_count() == 0) throw ConfigError("sweep grid is empty");
  RiskSurface surface =
      sweep(cfg.scenario, cfg.uncertainty, grid, cfg.sweep.trials_per_constellation, cfg.master_seed, ctx.exec);
  surface.config_hash = ctx.header.config_hash;
  return surface;
}

void write_surface_outputs(const Context& ctx, const RiskSurface& surface) {
  write_file(ctx.out_dir / "surface_table.csv",
             [&](std::ostream& out) { write_surface_table_csv(out, ctx.header, surface); });
  write_file(ctx.out_dir / "surface_long.csv",
             [&](std::ostream& out) { write_surface_long_csv(out, ctx.header, surface); });
  write_json(ctx.out_dir / "surface.json", surface_to_json(surface, ctx.header));
  write_file(ctx.out_dir / "plot_probability_vs_us.csv",
             [&](std::ostream& out) { write_probability_vs_us_csv(out, ctx.header, surface); });
  write_file(ctx.out_dir / "plot_events_vs_ut.csv",
             [&](std::ostream& out) { write_events_vs_ut_csv(out, ctx.header, surface); });
  write_file(ctx.out_dir / "plot_severity_distribution.csv",
             [&](std::ostream& out) { write_severity_distribution_csv(out, ctx.header, surface); });
}

int cmd_sweep(const CommonOptions& opts) {
  Context ctx = build_context(opts);
  const RiskSurface surface = run_sweep(ctx);
  write_surface_outputs(ctx, surface);
  std::uint64_t collisions = 0;
  for (const auto& c : surface.cells) collisions += c.collisions;
  say("sweep {} constellations={} trials={} collisions={}\n", to_string(surface.grid.mode),
             surface.cells.size(), surface.total_trials, collisions);
  return kExitOk;
}

int cmd_evaluate(const CommonOptions& opts) {
  Context ctx = build_context(opts);
  const ExperimentConfig& cfg = ctx.config;
  RiskSurface surface;
  if (cfg.safety.surface) {
    std::ifstream in(*cfg.safety.surface);
    if (!in) throw ConfigError(fmt::format("cannot read surface file {}", *cfg.safety.surface));
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("surface file {}: {}", *cfg.safety.surface, e.what()));
    }
    surface = surface_from_json(doc);
  } else {
    surface = run_sweep(ctx);
    write_surface_outputs(ctx, surface);
  }
  const SafetyEvaluation eval =
      evaluate_safety_limit(surface, cfg.safety.lambda, cfg.safety.severity_limit, cfg.safety.severity_quantile);
  const std::string summary = safety_summary(surface, eval);
  write_json(ctx.out_dir / "safety.json", safety_to_json(eval, surface, ctx.header));
  write_file(ctx.out_dir / "safety.txt", [&](std::ostream& out) { out << summary; });
  say("{}", summary);
  return kExitOk;
}

std::string preset_help() {
  std::string names;
  for (const auto& n : experiment_preset_names()) names += (names.empty() ? "" : ", ") + n;
  for (const auto& n : benchmark_names()) names += ", " + n;
  return "experiment or benchmark preset: " + names;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--preset", opts.preset, preset_help());
  sub->add_option("--out", opts.out, "output directory");
  sub->add_option("--seed", opts.seed, "master seed");
  sub->add_option("--workers", opts.workers, "worker threads (0 = all available)");
  sub->add_flag("-q,--quiet", opts.quiet, "suppress progress and summary output");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"hrisk: rare-event risk estimation for human-robot interaction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions opts;
  auto* simulate = app.add_subcommand("simulate", "run scenario trials at one constellation");
  add_common(simulate, opts);
  simulate->add_option("--trials", opts.trials, "number of trials");

  auto* estimate = app.add_subcommand("estimate", "estimate the critical-event probability");
  add_common(estimate, opts);
  estimate->add_option("--method", opts.method, "mc or grid-is")->check(CLI::IsMember({"mc", "grid-is"}));
  estimate->add_option("--n", opts.samples, "samples per repetition");
  estimate->add_option("--repetitions", opts.repetitions, "independent repetitions");

  auto* compare = app.add_subcommand("compare", "compare MC and grid-IS by VAE");
  add_common(compare, opts);
  compare->add_option("--n", opts.samples, "samples per repetition");
  compare->add_option("--repetitions", opts.repetitions, "independent repetitions (>= 2)");

  auto* sweep_cmd = app.add_subcommand("sweep", "build a risk surface over uncertainty constellations");
  add_common(sweep_cmd, opts);
  sweep_cmd->add_option("--trials", opts.trials, "trials per constellation");

  auto* evaluate = app.add_subcommand("evaluate", "derive the admissible region and safety limits");
  add_common(evaluate, opts);
  evaluate->add_option("--trials", opts.trials, "trials per constellation when sweeping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(opts);
    if (*estimate) return cmd_estimate(opts);
    if (*compare) return cmd_compare(opts);
    if (*sweep_cmd) return cmd_sweep(opts);
    if (*evaluate) return cmd_evaluate(opts);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const DiagnosticError& e) {
    fmt::print(stderr, "diagnostic: {}\n", e.what());
    return kExitDiagnostic;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace hrisk::cli
