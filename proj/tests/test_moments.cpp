#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/moments.hpp"
#include "stochmap/engine.hpp"
#include "stochmap/regimes.hpp"

using namespace stochmap;
using namespace stochmap::analytics;

TEST(Moments, ConstantSample) {
  const double xs[] = {1.0, 1.0, 1.0};
  const auto s = moments(xs);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.variance, 0.0);
  EXPECT_EQ(s.skewness, 0.0);
  EXPECT_EQ(s.excess_kurtosis, 0.0);
}

// Reference values computed by hand from the bias-corrected G1 and G2
// definitions for {1, 2, 3, 4, 10}.
TEST(Moments, SmallSample) {
  const double xs[] = {1.0, 2.0, 3.0, 4.0, 10.0};
  const auto s = moments(xs);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.variance, 12.5);
  const double n = 5.0;
  const double m2 = 50.0 / n;
  const double m3 = (-27.0 - 8.0 - 1.0 + 0.0 + 216.0) / n;
  const double m4 = (81.0 + 16.0 + 1.0 + 0.0 + 1296.0) / n;
  const double g1 = m3 / std::pow(m2, 1.5);
  const double g2 = m4 / (m2 * m2) - 3.0;
  EXPECT_NEAR(s.skewness, std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1, 1e-12);
  EXPECT_NEAR(s.excess_kurtosis, (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0),
              1e-12);
}

TEST(Moments, Errors) {
  const double one[] = {1.0};
  EXPECT_THROW(moments(one), std::invalid_argument);
}

TEST(PairwiseSum, ExactOnManyTerms) {
  std::vector<double> xs(1'000'003, 0.1);
  EXPECT_NEAR(pairwise_sum(xs), 100000.3, 1e-7);
}

TEST(Moments, SkewedIndependentVariance) {
  const auto regime = Regime::skewed_independent(0.4);
  const SimulationPlan plan{3, 10'000, 200'000, 10, 1};
  const auto xs = evolve(AgentState{}, make_coefficients(regime), plan, make_noise(regime));
  const auto s = moments(xs);
  EXPECT_NEAR(s.mean, 1.0, 0.01);
  EXPECT_NEAR(s.variance / 0.125, 1.0, 0.03);
}

TEST(Moments, SkewedCoupledVarianceAtZero) {
  const auto regime = Regime::skewed_coupled(0.0);
  const SimulationPlan plan{5, 10'000, 200'000, 10, 1};
  const auto xs = evolve(AgentState{}, make_coefficients(regime), plan, make_noise(regime));
  EXPECT_NEAR(moments(xs).variance / 0.5, 1.0, 0.03);
}

TEST(BatchMeans, MatchesIidStandardError) {
  Rng rng(11);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = rng.uniform();
  const double iid = std::sqrt(1.0 / 12.0 / xs.size());
  EXPECT_NEAR(batch_means_standard_error(xs) / iid, 1.0, 0.35);
  EXPECT_THROW(batch_means_standard_error(xs, 1), std::invalid_argument);
}

TEST(BatchMeans, InflatedByCorrelation) {
  const auto regime = Regime::skewed_independent(0.9);
  const SimulationPlan plan{2, 1000, 100'000, 1, 1};
  const auto xs = evolve(AgentState{}, make_coefficients(regime), plan, make_noise(regime));
  EXPECT_GT(batch_means_standard_error(xs), 2.0 * moments(xs).standard_error());
}
