#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hrisk/errors.hpp"
#include "hrisk/uncertainty.hpp"

using namespace hrisk;

TEST(Uncertainty, SpatialDeviationIsAffine) {
  EXPECT_DOUBLE_EQ(spatial_deviation(0.1, 0.05, 0.8), 0.1 + 0.04);
  EXPECT_DOUBLE_EQ(spatial_deviation(-0.2, 0.0, 1.0), -0.2);
}

TEST(Uncertainty, PerturbedDistanceClampsAtZero) {
  EXPECT_DOUBLE_EQ(perturb_distance(1.0, 0.25), 1.25);
  EXPECT_DOUBLE_EQ(perturb_distance(0.1, -0.3), 0.0);
  static_assert(perturb_distance(0.5, -0.5) == 0.0);
}

TEST(Uncertainty, DelayDrawsCoverRange) {
  TemporalUncertaintyModel m{0.05, 2, 5};
  RandomStream s(5, {});
  std::set<int> seen;
  for (int i = 0; i < 1000; ++i) {
    const int n = sample_delay_steps(m, s);
    ASSERT_GE(n, 2);
    ASSERT_LE(n, 5);
    seen.insert(n);
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_DOUBLE_EQ(delay_from_steps(m, 4), 4 * 0.05);
  RandomStream t(6, {});
  const double u_t = sample_temporal(m, t);
  EXPECT_NEAR(std::fmod(u_t / 0.05 + 1e-9, 1.0), 0.0, 1e-6);
}

TEST(Uncertainty, SpatialDrawsUseThreeDraws) {
  SpatialUncertaintyModel m{0.1, 0.02, 0.01, 0.03};
  RandomStream s(9, {});
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_spatial_params(m, s);
    ASSERT_GE(p.c, 0.01);
    ASSERT_LE(p.c, 0.03);
    sum += p.delta_d0;
  }
  EXPECT_EQ(s.draws_consumed(), 3u * n);
  EXPECT_NEAR(sum / n, 0.1, 4 * 0.02 / std::sqrt(n));
}

TEST(Uncertainty, ZeroSpreadIsDeterministic) {
  SpatialUncertaintyModel m{0.0, 0.0, 0.0, 0.0};
  RandomStream s(1, {});
  const auto p = sample_spatial_params(m, s);
  EXPECT_EQ(p.delta_d0, 0.0);
  EXPECT_EQ(p.c, 0.0);
}

TEST(Uncertainty, ValidationRejectsBadModels) {
  EXPECT_THROW((TemporalUncertaintyModel{0.05, 5, 2}.validate()), ConfigError);
  EXPECT_THROW((TemporalUncertaintyModel{0.0, 0, 2}.validate()), ConfigError);
  EXPECT_THROW((TemporalUncertaintyModel{0.05, -1, 2}.validate()), ConfigError);
  EXPECT_THROW((SpatialUncertaintyModel{0.0, -0.1, 0.0, 0.1}.validate()), ConfigError);
  EXPECT_THROW((SpatialUncertaintyModel{0.0, 0.1, 0.2, 0.1}.validate()), ConfigError);
  EXPECT_NO_THROW(UncertaintySpec{}.validate());
}

TEST(Uncertainty, ClassNamesRoundTrip) {
  for (auto c : {UncertaintyClass::kSystematic, UncertaintyClass::kStatistical}) {
    EXPECT_EQ(uncertainty_class_from_string(to_string(c)), c);
  }
  EXPECT_THROW(uncertainty_class_from_string("sometimes"), ConfigError);
}
