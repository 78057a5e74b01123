#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stochmap::analytics {

// Pairwise (cascade) summation of f(x[i]). The split points depend only on
// the length, so the result is reproducible.
template <typename Fn>
double pairwise_sum(std::span<const double> xs, Fn&& f) {
  constexpr std::size_t leaf = 64;
  if (xs.size() <= leaf) {
    double s = 0.0;
    for (double x : xs) s += f(x);
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half), f) + pairwise_sum(xs.subspan(half), f);
}

inline double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum(xs, [](double x) { return x; });
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  // Unbiased.
  double variance = 0.0;
  // Bias-corrected G1 and G2. Reported as 0 when the sample has no spread
  // or is too short for the estimator.
  double skewness = 0.0;
  double excess_kurtosis = 0.0;

  double stddev() const { return std::sqrt(variance); }
  // Standard error of the mean for independent samples.
  double standard_error() const { return std::sqrt(variance / static_cast<double>(count)); }
};

// Two-pass central moments.
inline MomentSummary moments(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("moments need at least 2 samples");
  MomentSummary out;
  out.count = xs.size();
  const double n = static_cast<double>(xs.size());
  out.mean = mean(xs);
  const double mu = out.mean;
  const double m2 = pairwise_sum(xs, [mu](double x) { return (x - mu) * (x - mu); }) / n;
  const double m3 = pairwise_sum(xs, [mu](double x) {
                      const double d = x - mu;
                      return d * d * d;
                    }) / n;
  const double m4 = pairwise_sum(xs, [mu](double x) {
                      const double d = (x - mu) * (x - mu);
                      return d * d;
                    }) / n;
  out.variance = m2 * n / (n - 1.0);
  if (m2 > 0.0) {
    if (xs.size() >= 3) {
      const double g1 = m3 / std::pow(m2, 1.5);
      out.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
    }
    if (xs.size() >= 4) {
      const double g2 = m4 / (m2 * m2) - 3.0;
      out.excess_kurtosis = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
    }
  }
  return out;
}

// Standard error of the mean of an autocorrelated series by non-overlapping
// batch means.
inline double batch_means_standard_error(std::span<const double> xs, std::size_t batches = 50) {
  if (batches < 2) throw std::invalid_argument("batch means need at least 2 batches");
  const std::size_t size = xs.size() / batches;
  if (size < 1) throw std::invalid_argument("series too short for the requested batches");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean(xs.subspan(b * size, size));
  return moments(means).standard_error();
}

}  // namespace stochmap::analytics
