#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/moments.hpp"

namespace stochmap::analytics {

struct NormalityStats {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

// <log(1 + eps)> for eps ~ U[0, a].
inline double mean_log_one_plus_uniform(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("epsilon range must be positive");
  return ((1.0 + a) * std::log1p(a) - a) / a;
}

// Per-step drift of log m for m(t+1) = lambda (1 + eps) m(t), eps ~ U[0, a].
inline double product_map_drift(double lambda, double a) {
  return std::log(lambda) + mean_log_one_plus_uniform(a);
}

// Statistics of z = (log m(T) - T * drift) / sqrt(T).
inline NormalityStats normality_check(std::span<const double> log_m, double steps, double drift) {
  if (!(steps > 0.0)) throw std::invalid_argument("step count must be positive");
  const double root = std::sqrt(steps);
  std::vector<double> z;
  z.reserve(log_m.size());
  for (double l : log_m) {
    if (!std::isfinite(l)) throw std::invalid_argument("log m must be finite");
    z.push_back((l - steps * drift) / root);
  }
  const MomentSummary s = moments(z);
  return {s.skewness, s.excess_kurtosis, s.mean, s.variance, s.count};
}

// Same, from direct-space values. Rejects m <= 0.
inline NormalityStats normality_check_values(std::span<const double> m, double steps,
                                             double drift) {
  std::vector<double> logs;
  logs.reserve(m.size());
  for (double x : m) {
    if (!(x > 0.0)) throw std::invalid_argument("normality check requires m > 0");
    logs.push_back(std::log(x));
  }
  return normality_check(logs, steps, drift);
}

}  // namespace stochmap::analytics
