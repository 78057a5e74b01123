#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/tail_fit.hpp"
#include "stochmap/rng.hpp"

using namespace stochmap;
using namespace stochmap::analytics;

namespace {

// Inverse CDF of the density (a - 1) x^-a on [1, inf).
std::vector<double> pareto(double a, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(count);
  for (auto& x : xs) x = std::pow(1.0 - rng.uniform(), -1.0 / (a - 1.0));
  return xs;
}

}  // namespace

TEST(Quantile, Type7) {
  const double xs[] = {4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile(xs, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.9), 3.7);
}

TEST(LeastSquares, ExactLine) {
  const double x[] = {0.0, 1.0, 2.0, 3.0};
  const double y[] = {1.0, 3.0, 5.0, 7.0};
  const auto fit = least_squares(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-12);
}

TEST(FitTail, HillRecoversParetoTwo) {
  const auto xs = pareto(2.0, 100'000, 1);
  const auto fit = fit_tail(xs, XminRule::at_value(1.0));
  EXPECT_NEAR(fit.exponent, 2.0, 0.02);
  EXPECT_EQ(fit.n_tail, xs.size());
  EXPECT_NEAR(fit.standard_error, (fit.exponent - 1.0) / std::sqrt(1e5), 1e-12);
  EXPECT_EQ(fit.method, TailMethod::hill);
}

TEST(FitTail, HillWithinThreeStandardErrors) {
  for (double a : {1.5, 2.0, 3.0}) {
    for (std::uint64_t seed : {2u, 3u, 4u}) {
      const auto fit = fit_tail(pareto(a, 20'000, seed));
      EXPECT_LT(std::abs(fit.exponent - a), 3.0 * fit.standard_error) << a << " " << seed;
    }
  }
}

TEST(FitTail, RegressionRecoversPareto) {
  for (double a : {1.5, 2.0, 3.0}) {
    const auto xs = pareto(a, 200'000, 5);
    const auto fit = fit_tail(xs, XminRule::at_value(1.0).up_to(100.0),
                              TailMethod::loglog_regression);
    EXPECT_NEAR(fit.exponent, a, 0.05) << a;
    EXPECT_EQ(fit.method, TailMethod::loglog_regression);
  }
}

TEST(FitTail, Errors) {
  const std::vector<double> few(5, 2.0);
  EXPECT_THROW(fit_tail(few), std::invalid_argument);
  const std::vector<double> flat(100, 2.0);
  EXPECT_THROW(fit_tail(flat), std::invalid_argument);
  EXPECT_THROW(fit_tail(flat, {}, TailMethod::loglog_regression), std::invalid_argument);
}

TEST(TailMethod, Names) {
  EXPECT_EQ(parse_tail_method(to_string(TailMethod::hill)), TailMethod::hill);
  EXPECT_EQ(parse_tail_method(to_string(TailMethod::loglog_regression)),
            TailMethod::loglog_regression);
  EXPECT_FALSE(parse_tail_method("mle").has_value());
}
