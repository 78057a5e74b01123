#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stochmap::oracle {

// A closed-form reference value together with where it comes from and
// where it holds.
struct OracleValue {
  double value = 0.0;
  std::string source;
  std::string validity;
};

// <m> = 1 for the coupled-parameter map with n = 1.
inline double stationary_mean_skewed() { return 1.0; }

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("lambda must lie in [0, 1]");
  }
}

// (1 - lambda) / (2 (2 + lambda)), independent epsilon and xi.
inline double stationary_variance_independent(double lambda) {
  check_lambda(lambda);
  return (1.0 - lambda) / (2.0 * (2.0 + lambda));
}

// (1 - lambda) / (2 + lambda), xi = epsilon.
inline double stationary_variance_coupled(double lambda) {
  check_lambda(lambda);
  return (1.0 - lambda) / (2.0 + lambda);
}

// Per-agent mean (1 - lambda)^(n - 1) from (1 - lambda)^(1 - n) <m> = 1.
inline double mean_power(double lambda, double n) {
  check_lambda(lambda);
  if (!(n <= 1.0)) throw std::domain_error("n must not exceed 1");
  const double value = std::pow(1.0 - lambda, n - 1.0);
  if (!(value <= 1e300)) throw std::overflow_error("mean_power overflows above 1e300");
  return value;
}

// Density exponent a in P(m) ~ m^(-a), a = (n - 2) / (n - 1). Tends to 1
// as n -> -infinity.
inline double tail_exponent(double n) {
  if (n == 1.0) throw std::domain_error("tail_exponent has a pole at n = 1");
  if (!(n <= 0.0)) throw std::domain_error("tail_exponent requires n <= 0");
  if (std::isinf(n)) return 1.0;
  return (n - 2.0) / (n - 1.0);
}

// <log(1 + eps)> for eps ~ U[0, 1] is 2 log 2 - 1.
inline double mean_log_one_plus_eps() { return 2.0 * std::log(2.0) - 1.0; }

// Root of log(lambda) + <log(1 + eps)>: exp(1 - 2 log 2) = e / 4.
inline double critical_lambda() { return std::exp(-mean_log_one_plus_eps()); }

inline const std::vector<std::string_view>& oracle_names() {
  static const std::vector<std::string_view> names = {
      "stationary_mean", "variance_independent", "variance_coupled",
      "mean_power",      "tail_exponent",        "critical_lambda"};
  return names;
}

// Named lookup used by the command line. Throws std::invalid_argument for an
// unknown name or a wrong parameter count.
inline OracleValue lookup(std::string_view name, std::span<const double> params) {
  auto expect = [&](std::size_t count) {
    if (params.size() != count) {
      throw std::invalid_argument(std::string(name) + " expects " + std::to_string(count) +
                                  " parameter(s)");
    }
  };
  if (name == "stationary_mean") {
    expect(0);
    return {stationary_mean_skewed(),
            "stationary mean of m(t+1) = (lambda + eps(1-lambda)) m(t) + xi(1-lambda): <m> = 1",
            "0 <= lambda <= 1"};
  }
  if (name == "variance_independent") {
    expect(1);
    return {stationary_variance_independent(params[0]),
            "stationary variance with independent eps, xi: V = (1-lambda)/(2(2+lambda))",
            "0 <= lambda <= 1"};
  }
  if (name == "variance_coupled") {
    expect(1);
    return {stationary_variance_coupled(params[0]),
            "stationary variance with xi = eps: V = (1-lambda)/(2+lambda)", "0 <= lambda <= 1"};
  }
  if (name == "mean_power") {
    expect(2);
    return {mean_power(params[0], params[1]),
            "per-agent mean from (1-lambda)^(1-n) <m> = 1: <m> = (1-lambda)^(n-1)",
            "0 <= lambda < 1, n <= 1"};
  }
  if (name == "tail_exponent") {
    expect(1);
    return {tail_exponent(params[0]),
            "pooled density tail P(m) ~ m^-((n-2)/(n-1)) for uniform lambda", "n <= 0"};
  }
  if (name == "critical_lambda") {
    expect(0);
    return {critical_lambda(),
            "opinion map critical point: -log lambda_c = <log(1+eps)> = 2 log 2 - 1, "
            "lambda_c = e/4",
            "eps ~ U[0, 1]"};
  }
  throw std::invalid_argument("unknown oracle: " + std::string(name));
}

}  // namespace stochmap::oracle
