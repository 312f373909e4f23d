#include "hrisk/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "hrisk/errors.hpp"

namespace hrisk {

using nlohmann::json;

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

// Spatial columns of the delay x deviation table: the u_s axis itself in 2-D
// mode, equal-width bins of the effective u_s in 3-D mode.
struct SpatialColumns {
  std::vector<std::string> labels;
  std::vector<std::size_t> column_of_cell;
};

SpatialColumns spatial_columns(const RiskSurface& surface) {
  SpatialColumns cols;
  cols.column_of_cell.resize(surface.cells.size());
  if (surface.grid.mode == SweepMode::k2D) {
    const std::size_t nu = surface.grid.u_s.size();
    for (double u : surface.grid.u_s) cols.labels.push_back(format_number(u));
    for (std::size_t i = 0; i < surface.cells.size(); ++i) cols.column_of_cell[i] = i % nu;
    return cols;
  }
  double lo = surface.cells.front().u_s;
  double hi = lo;
  for (const auto& c : surface.cells) {
    lo = std::min(lo, c.u_s);
    hi = std::max(hi, c.u_s);
  }
  const int bins = surface.grid.table_bins;
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  for (int b = 0; b < bins; ++b) {
    cols.labels.push_back(fmt::format("[{};{}]", format_number(lo + b * width), format_number(lo + (b + 1) * width)));
  }
  for (std::size_t i = 0; i < surface.cells.size(); ++i) {
    const int b = hi > lo ? static_cast<int>((surface.cells[i].u_s - lo) / width) : 0;
    cols.column_of_cell[i] = static_cast<std::size_t>(std::clamp(b, 0, bins - 1));
  }
  return cols;
}

}  // namespace

std::string OutputHeader::csv_line() const {
  return fmt::format("# hrisk {} seed={} config_hash={}\n", tool_version, master_seed, config_hash);
}

json OutputHeader::to_json() const {
  return {{"tool", "hrisk"}, {"tool_version", tool_version}, {"master_seed", master_seed}, {"config_hash", config_hash}};
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_trials_csv(std::ostream& out, const OutputHeader& header, std::span<const TrialOutcome> trials) {
  out << header.csv_line();
  out << "trial_index,N,delta_d0,c,collided,collision_step,F_c,severity,min_true_distance\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    out << i << ',' << t.params.delay_steps << ',' << format_number(t.params.delta_d0) << ','
        << format_number(t.params.c) << ',' << (t.collided ? "true" : "false") << ',' << opt(t.collision_step)
        << ',' << format_number(t.collision_force_Fc) << ',' << format_number(t.severity) << ','
        << format_number(t.min_true_distance) << '\n';
  }
}

json estimate_to_json(const EstimateReport& report, const OutputHeader& header, const std::string& problem,
                      std::optional<double> true_probability) {
  json j;
  j["meta"] = header.to_json();
  j["problem"] = problem;
  j["true_probability"] = opt_json(true_probability);
  j["method"] = to_string(report.method);
  j["p_hat"] = report.p_hat;
  j["per_repetition_estimates"] = report.per_repetition;
  j["repetitions"] = report.per_repetition.size();
  j["vae"] = opt_json(report.vae);
  j["samples_per_repetition"] = report.samples_per_repetition;
  j["samples_total"] = report.samples_total;
  j["master_seed"] = report.master_seed;
  j["notes"] = report.notes;
  if (report.method == Method::kGridIs) {
    j["beta"] = opt_json(report.beta);
    j["edges_per_side"] = report.edges_per_side ? json(*report.edges_per_side) : json(nullptr);
    j["noise_scale"] = opt_json(report.noise_scale);
    j["single_cell"] = report.single_cell;
    json grids = json::array();
    for (const auto& g : report.grids) {
      grids.push_back({{"learn_samples", g.learn_samples},
                       {"learn_critical", g.learn_critical},
                       {"learn_critical_per_cell", g.learn_critical_per_cell},
                       {"densities", g.densities},
                       {"allocation", g.allocation},
                       {"critical_per_cell", g.critical_per_cell}});
    }
    j["grids"] = grids;
  }
  return j;
}

void write_estimate_summary_csv(std::ostream& out, const OutputHeader& header,
                                std::span<const EstimateReport> reports) {
  out << header.csv_line();
  out << "method,p_hat,vae,n,beta,e,seed\n";
  for (const auto& r : reports) {
    out << to_string(r.method) << ',' << format_number(r.p_hat) << ',' << opt(r.vae) << ','
        << r.samples_per_repetition << ',' << opt(r.beta) << ',' << opt(r.edges_per_side) << ','
        << r.master_seed << '\n';
  }
}

void write_repetitions_csv(std::ostream& out, const OutputHeader& header, std::span<const EstimateReport> reports) {
  out << header.csv_line();
  out << "repetition";
  std::size_t rows = 0;
  for (const auto& r : reports) {
    out << ',' << to_string(r.method);
    rows = std::max(rows, r.per_repetition.size());
  }
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out << i;
    for (const auto& r : reports) {
      out << ',' << (i < r.per_repetition.size() ? format_number(r.per_repetition[i]) : std::string());
    }
    out << '\n';
  }
}

void write_surface_table_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface) {
  const SpatialColumns cols = spatial_columns(surface);
  std::map<int, std::vector<std::pair<std::uint64_t, std::uint64_t>>> rows;  // delay -> (collisions, trials)
  for (int n : surface.grid.delay_steps) rows.try_emplace(n, cols.labels.size(), std::pair<std::uint64_t, std::uint64_t>{0, 0});
  for (std::size_t i = 0; i < surface.cells.size(); ++i) {
    const auto& cell = surface.cells[i];
    auto& slot = rows[cell.delay_steps][cols.column_of_cell[i]];
    slot.first += cell.collisions;
    slot.second += cell.trials;
  }
  out << header.csv_line();
  out << csv_field("delay_steps \\ u_s [m]");
  for (const auto& label : cols.labels) out << ',' << csv_field(label);
  out << '\n';
  for (const auto& [delay, slots] : rows) {
    out << delay;
    for (const auto& [collisions, trials] : slots) {
      out << ',';
      if (trials == 0) out << "N/A";
      else out << format_number(static_cast<double>(collisions) / static_cast<double>(trials));
    }
    out << '\n';
  }
}

void write_surface_long_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface) {
  out << header.csv_line();
  out << "index,delay_steps,u_t,delta_d0,c,u_s,trials,collisions,threshold_events,p_hat,expected_severity,"
         "mean_severity_given_collision,severity_q50,severity_q90,severity_q99,severity_q50_all,"
         "severity_q90_all,severity_q99_all,scalar_risk\n";
  for (std::size_t i = 0; i < surface.cells.size(); ++i) {
    const auto& c = surface.cells[i];
    const std::string scalar = c.p_hat ? format_number(risk_value(c).scalar_risk) : std::string();
    out << i << ',' << c.delay_steps << ',' << format_number(c.u_t) << ',' << format_number(c.delta_d0) << ','
        << format_number(c.c) << ',' << format_number(c.u_s) << ',' << c.trials << ',' << c.collisions << ','
        << c.threshold_events << ',' << opt(c.p_hat) << ',' << opt(c.expected_severity) << ','
        << opt(c.mean_severity_given_collision) << ',' << opt(c.severity_q50) << ',' << opt(c.severity_q90) << ','
        << opt(c.severity_q99) << ',' << opt(c.severity_q50_all) << ',' << opt(c.severity_q90_all) << ','
        << opt(c.severity_q99_all) << ',' << scalar << '\n';
  }
}

json surface_to_json(const RiskSurface& surface, const OutputHeader& header) {
  json j;
  j["meta"] = header.to_json();
  j["scenario_kind"] = to_string(surface.kind);
  j["timestep_T"] = surface.timestep_T;
  j["human_speed_vH"] = surface.human_speed_vH;
  j["trials_per_constellation"] = surface.trials_per_constellation;
  j["master_seed"] = surface.master_seed;
  j["config_hash"] = surface.config_hash;
  j["total_trials"] = surface.total_trials;
  j["grid"] = {{"mode", to_string(surface.grid.mode)},
               {"delay_steps", surface.grid.delay_steps},
               {"delta_d0", surface.grid.delta_d0},
               {"c", surface.grid.c},
               {"u_s", surface.grid.u_s},
               {"table_bins", surface.grid.table_bins}};
  json cells = json::array();
  for (const auto& c : surface.cells) {
    cells.push_back({{"delay_steps", c.delay_steps},
                     {"u_t", c.u_t},
                     {"delta_d0", c.delta_d0},
                     {"c", c.c},
                     {"u_s", c.u_s},
                     {"trials", c.trials},
                     {"collisions", c.collisions},
                     {"threshold_events", c.threshold_events},
                     {"p_hat", opt_json(c.p_hat)},
                     {"expected_severity", opt_json(c.expected_severity)},
                     {"mean_severity_given_collision", opt_json(c.mean_severity_given_collision)},
                     {"severity_q50", opt_json(c.severity_q50)},
                     {"severity_q90", opt_json(c.severity_q90)},
                     {"severity_q99", opt_json(c.severity_q99)},
                     {"severity_q50_all", opt_json(c.severity_q50_all)},
                     {"severity_q90_all", opt_json(c.severity_q90_all)},
                     {"severity_q99_all", opt_json(c.severity_q99_all)}});
  }
  j["constellations"] = cells;
  return j;
}

RiskSurface surface_from_json(const json& doc) {
  try {
    RiskSurface s;
    s.kind = scenario_kind_from_string(doc.at("scenario_kind").get<std::string>());
    s.timestep_T = doc.at("timestep_T").get<double>();
    s.human_speed_vH = doc.at("human_speed_vH").get<double>();
    s.trials_per_constellation = doc.at("trials_per_constellation").get<std::uint64_t>();
    s.master_seed = doc.at("master_seed").get<std::uint64_t>();
    s.config_hash = doc.at("config_hash").get<std::string>();
    s.total_trials = doc.at("total_trials").get<std::uint64_t>();
    const json& g = doc.at("grid");
    s.grid.mode = sweep_mode_from_string(g.at("mode").get<std::string>());
    s.grid.delay_steps = g.at("delay_steps").get<std::vector<int>>();
    s.grid.delta_d0 = g.at("delta_d0").get<std::vector<double>>();
    s.grid.c = g.at("c").get<std::vector<double>>();
    s.grid.u_s = g.at("u_s").get<std::vector<double>>();
    s.grid.table_bins = g.at("table_bins").get<int>();
    for (const json& c : doc.at("constellations")) {
      ConstellationStats cell;
      cell.delay_steps = c.at("delay_steps").get<int>();
      cell.u_t = c.at("u_t").get<double>();
      cell.delta_d0 = c.at("delta_d0").get<double>();
      cell.c = c.at("c").get<double>();
      cell.u_s = c.at("u_s").get<double>();
      cell.trials = c.at("trials").get<std::uint64_t>();
      cell.collisions = c.at("collisions").get<std::uint64_t>();
      cell.threshold_events = c.at("threshold_events").get<std::uint64_t>();
      cell.p_hat = opt_from_json(c, "p_hat");
      cell.expected_severity = opt_from_json(c, "expected_severity");
      cell.mean_severity_given_collision = opt_from_json(c, "mean_severity_given_collision");
      cell.severity_q50 = opt_from_json(c, "severity_q50");
      cell.severity_q90 = opt_from_json(c, "severity_q90");
      cell.severity_q99 = opt_from_json(c, "severity_q99");
      cell.severity_q50_all = opt_from_json(c, "severity_q50_all");
      cell.severity_q90_all = opt_from_json(c, "severity_q90_all");
      cell.severity_q99_all = opt_from_json(c, "severity_q99_all");
      s.cells.push_back(cell);
    }
    if (s.cells.size() != s.grid.constellation_count()) {
      throw ConfigError("surface file: constellation count does not match its grid");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed surface file: ") + e.what());
  }
}

void write_probability_vs_us_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface) {
  out << header.csv_line();
  out << "u_s,u_t,delay_steps,p_hat,trials\n";
  for (const auto& c : surface.cells) {
    out << format_number(c.u_s) << ',' << format_number(c.u_t) << ',' << c.delay_steps << ',' << opt(c.p_hat)
        << ',' << c.trials << '\n';
  }
}

void write_events_vs_ut_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface) {
  struct Tally {
    double u_t = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t collisions = 0;
    std::uint64_t threshold_events = 0;
  };
  std::map<int, Tally> by_delay;
  for (const auto& c : surface.cells) {
    Tally& t = by_delay[c.delay_steps];
    t.u_t = c.u_t;
    t.trials += c.trials;
    t.collisions += c.collisions;
    t.threshold_events += c.threshold_events;
  }
  out << header.csv_line();
  out << "delay_steps,u_t,trials,threshold_events,threshold_event_fraction,collisions,collision_fraction\n";
  for (const auto& [delay, t] : by_delay) {
    const double n = static_cast<double>(t.trials);
    out << delay << ',' << format_number(t.u_t) << ',' << t.trials << ',' << t.threshold_events << ','
        << format_number(t.trials ? t.threshold_events / n : 0.0) << ',' << t.collisions << ','
        << format_number(t.trials ? t.collisions / n : 0.0) << '\n';
  }
}

void write_severity_distribution_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface,
                                     int bins) {
  const auto& sev = surface.collision_severities;
  const double hi = sev.empty() ? 1.0 : *std::max_element(sev.begin(), sev.end());
  const double width = hi > 0.0 ? hi / bins : 1.0;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  for (double s : sev) {
    const int b = std::clamp(static_cast<int>(s / width), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  const double total = static_cast<double>(surface.total_trials);
  const double collided = static_cast<double>(sev.size());
  const std::uint64_t no_collision = surface.total_trials - sev.size();

  out << header.csv_line();
  out << "bin_lo,bin_hi,count,fraction_given_collision,fraction_all_trials\n";
  // Point mass at zero: trials without collision.
  out << "0,0," << no_collision << ",," << format_number(total > 0 ? no_collision / total : 0.0) << '\n';
  for (int b = 0; b < bins; ++b) {
    const auto count = counts[static_cast<std::size_t>(b)];
    out << format_number(b * width) << ',' << format_number((b + 1) * width) << ',' << count << ','
        << format_number(collided > 0 ? count / collided : 0.0) << ','
        << format_number(total > 0 ? count / total : 0.0) << '\n';
  }
}

json safety_to_json(const SafetyEvaluation& eval, const RiskSurface& surface, const OutputHeader& header) {
  json j;
  j["meta"] = header.to_json();
  j["lambda"] = eval.lambda;
  j["severity_limit"] = std::isinf(eval.severity_limit) ? json("inf") : json(eval.severity_limit);
  j["severity_quantile"] = eval.severity_quantile;
  j["evaluated_constellations"] = eval.evaluated_count;
  j["admissible_count"] = eval.admissible_count;
  j["no_admissible_components"] = eval.no_admissible_components;
  j["tolerated_u_t_max"] = opt_json(eval.tolerated_u_t_max);
  j["tolerated_delay_steps"] = eval.tolerated_delay_steps ? json(*eval.tolerated_delay_steps) : json(nullptr);
  j["tolerated_u_s_max"] = opt_json(eval.tolerated_u_s_max);
  j["box_constellations"] = eval.box_constellations;
  json region = json::array();
  for (std::size_t i = 0; i < surface.cells.size(); ++i) {
    if (!eval.admissible[i]) continue;
    const auto& c = surface.cells[i];
    region.push_back({{"index", i}, {"delay_steps", c.delay_steps}, {"u_t", c.u_t}, {"delta_d0", c.delta_d0},
                      {"c", c.c}, {"u_s", c.u_s}, {"p_hat", opt_json(c.p_hat)}});
  }
  j["admissible_region"] = region;
  return j;
}

}  // namespace hrisk
