#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "hrisk/estimator.hpp"
#include "hrisk/risk.hpp"
#include "hrisk/scenario.hpp"

namespace hrisk {

/// Provenance stamped into every output: a leading "# ..." line in CSV files
/// and a "meta" object in JSON files.
struct OutputHeader {
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::string tool_version;

  [[nodiscard]] std::string csv_line() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// RFC 4180 quoting: fields containing a comma, quote or line break are quoted.
std::string csv_field(const std::string& text);
std::string format_number(double v);

void write_trials_csv(std::ostream& out, const OutputHeader& header, std::span<const TrialOutcome> trials);

nlohmann::json estimate_to_json(const EstimateReport& report, const OutputHeader& header,
                                const std::string& problem, std::optional<double> true_probability);
/// method,p_hat,vae,n,beta,e,seed rows; VAE left empty when undefined.
void write_estimate_summary_csv(std::ostream& out, const OutputHeader& header,
                                std::span<const EstimateReport> reports);
/// repetition,<method>... one column per report.
void write_repetitions_csv(std::ostream& out, const OutputHeader& header, std::span<const EstimateReport> reports);

/// Delay steps as rows, spatial deviation as columns, p_hat as values ("N/A" when no trials fall in a bin).
void write_surface_table_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface);
/// One row per constellation with every statistic.
void write_surface_long_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface);
nlohmann::json surface_to_json(const RiskSurface& surface, const OutputHeader& header);
RiskSurface surface_from_json(const nlohmann::json& doc);

/// Plot series: probability against u_s, event counts against u_t, severity histogram.
void write_probability_vs_us_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface);
void write_events_vs_ut_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface);
void write_severity_distribution_csv(std::ostream& out, const OutputHeader& header, const RiskSurface& surface,
                                     int bins = 20);

nlohmann::json safety_to_json(const SafetyEvaluation& eval, const RiskSurface& surface, const OutputHeader& header);

}  // namespace hrisk
