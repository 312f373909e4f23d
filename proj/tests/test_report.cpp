#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "hrisk/errors.hpp"
#include "hrisk/report.hpp"

using namespace hrisk;

namespace {

const OutputHeader kHeader{7, "00112233aabbccdd", "9.9.9"};

RiskSurface small_surface(SweepMode mode) {
  ScenarioConfig cfg;
  cfg.horizon_K = 200;
  cfg.geometry.start_jitter = 0.09;
  SweepGrid g;
  g.mode = mode;
  g.delay_steps = {2, 5, 8};
  g.delta_d0 = {-0.05, 0.05};
  g.c = {0.0, 0.05};
  g.u_s = {-0.1, 0.0, 0.1};
  g.table_bins = 4;
  return sweep(cfg, {}, g, 20, 3);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Report, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Report, NumbersRoundTrip) {
  RandomStream s(1, {});
  for (int i = 0; i < 1000; ++i) {
    const double x = s.normal() * 1e3;
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
}

TEST(Report, HeaderLine) {
  EXPECT_EQ(kHeader.csv_line(), "# hrisk 9.9.9 seed=7 config_hash=00112233aabbccdd\n");
  EXPECT_EQ(kHeader.to_json()["master_seed"], 7);
}

TEST(Report, TrialsCsv) {
  ScenarioConfig cfg;
  std::vector<TrialOutcome> trials{run_trial_with_offset(cfg, {9, 0.0, 0.0}, 0.0),
                                   run_trial_with_offset(cfg, {0, 0.0, 0.0}, 0.0)};
  std::ostringstream out;
  write_trials_csv(out, kHeader, trials);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[1], "trial_index,N,delta_d0,c,collided,collision_step,F_c,severity,min_true_distance");
  EXPECT_EQ(l[2].substr(0, 12), "0,9,0,0,true");
  EXPECT_EQ(l[3].substr(0, 15), "1,0,0,0,false,,");
}

TEST(Report, SurfaceJsonRoundTrip) {
  for (auto mode : {SweepMode::k2D, SweepMode::k3D}) {
    const RiskSurface s = small_surface(mode);
    const auto doc = surface_to_json(s, kHeader);
    const RiskSurface back = surface_from_json(doc);
    EXPECT_EQ(surface_to_json(back, kHeader), doc);
  }
  EXPECT_THROW(surface_from_json(nlohmann::json::object()), ConfigError);
}

TEST(Report, TableShape2d) {
  const RiskSurface s = small_surface(SweepMode::k2D);
  std::ostringstream out;
  write_surface_table_csv(out, kHeader, s);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 2u + 3u);
  EXPECT_EQ(l[0].rfind("# hrisk", 0), 0u);
  EXPECT_EQ(l[1], "delay_steps \\ u_s [m],-0.1,0,0.1");
  EXPECT_EQ(l[2].rfind("2,", 0), 0u);
  EXPECT_EQ(l[4].rfind("8,", 0), 0u);
}

TEST(Report, TableShape3dUsesBins) {
  const RiskSurface s = small_surface(SweepMode::k3D);
  std::ostringstream out;
  write_surface_table_csv(out, kHeader, s);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 5u);
  // u_s values -0.05, -0.01, 0.05, 0.09 over four bins: every bin gets one.
  for (std::size_t r = 2; r < l.size(); ++r) {
    EXPECT_EQ(std::count(l[r].begin(), l[r].end(), ','), 4);
    EXPECT_EQ(l[r].find("N/A"), std::string::npos);
  }
}

TEST(Report, EmptyBinsShowNotAvailable) {
  RiskSurface s = small_surface(SweepMode::k3D);
  s.grid.table_bins = 9;
  std::ostringstream out;
  write_surface_table_csv(out, kHeader, s);
  EXPECT_NE(out.str().find("N/A"), std::string::npos);
}

TEST(Report, PlotSeries) {
  const RiskSurface s = small_surface(SweepMode::k2D);
  std::ostringstream a, b, c;
  write_probability_vs_us_csv(a, kHeader, s);
  write_events_vs_ut_csv(b, kHeader, s);
  write_severity_distribution_csv(c, kHeader, s, 5);
  EXPECT_EQ(lines(a.str()).size(), 2u + s.cells.size());
  EXPECT_EQ(lines(b.str()).size(), 2u + 3u);
  EXPECT_EQ(lines(c.str()).size(), 2u + 1u + 5u);
}

TEST(Report, EstimateJsonAndSummary) {
  EstimateReport r;
  r.method = Method::kGridIs;
  r.p_hat = 0.5;
  r.per_repetition = {0.4, 0.6};
  r.vae = 0.02;
  r.samples_per_repetition = 100;
  r.beta = 0.2;
  r.edges_per_side = 10;
  r.master_seed = 7;
  const auto j = estimate_to_json(r, kHeader, "box-small", 0.01);
  EXPECT_EQ(j["method"], "grid-is");
  EXPECT_EQ(j["per_repetition_estimates"].size(), 2u);
  std::ostringstream out;
  const std::vector<EstimateReport> reports{r};
  write_estimate_summary_csv(out, kHeader, reports);
  const auto l = lines(out.str());
  EXPECT_EQ(l[1], "method,p_hat,vae,n,beta,e,seed");
  EXPECT_EQ(l[2], "grid-is,0.5,0.02,100,0.2,10,7");
}
