#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/engine.hpp"
#include "stochmap/regimes.hpp"

namespace stochmap::analytics {

struct VarianceGrowthOptions {
  // false: the product map lambda (1 + eps) m without the cap at 1.
  bool capped = false;
  // m(0) ~ U[spread_lo, spread_hi] across replicas; otherwise m(0) = 1.
  bool inject_spread = true;
  double spread_lo = 0.5;
  double spread_hi = 1.0;
  // Every replica consumes the same noise stream.
  bool shared_noise = false;
  double epsilon_max = 1.0;
  unsigned threads = 1;
};

inline constexpr std::size_t min_growth_replicas = 1000;

struct VarianceGrowth {
  std::vector<std::uint64_t> checkpoints;
  // Computed from log_m, so values far outside double range still compare.
  std::vector<double> log_variance;
  // exp(log_variance); may be 0 or inf.
  std::vector<double> variance;
};

// Unbiased variance of exp(l_i), returned as its logarithm. -inf when there
// is no spread.
inline double log_variance_of_exp(std::span<const double> log_values) {
  if (log_values.size() < 2) throw std::invalid_argument("variance needs at least 2 values");
  const double top = *std::max_element(log_values.begin(), log_values.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double n = static_cast<double>(log_values.size());
  const double s1 = pairwise_sum(log_values, [top](double l) { return std::exp(l - top); }) / n;
  const double s2 =
      pairwise_sum(log_values, [top](double l) { return std::exp(2.0 * (l - top)); }) / n;
  const double scaled = (s2 - s1 * s1) * n / (n - 1.0);
  if (!(scaled > 0.0)) return -std::numeric_limits<double>::infinity();
  return 2.0 * top + std::log(scaled);
}

// Ensemble variance of m at each checkpoint for the opinion map at `lambda`.
// Replica r runs on stream (plan.seed, 0, r); plan.burn_in, samples and
// stride are not used.
inline VarianceGrowth variance_growth(double lambda, std::span<const std::uint64_t> checkpoints,
                                      const SimulationPlan& plan,
                                      const VarianceGrowthOptions& options = {}) {
  plan.validate();
  if (plan.replicas < min_growth_replicas) {
    throw std::invalid_argument("variance growth needs at least 1000 replicas");
  }
  if (checkpoints.empty()) throw std::invalid_argument("no checkpoints given");
  if (options.inject_spread &&
      !(options.spread_lo > 0.0 && options.spread_hi >= options.spread_lo)) {
    throw std::invalid_argument("initial spread must satisfy 0 < lo <= hi");
  }

  const MapCoefficients coeffs = options.capped
                                     ? make_coefficients(Regime::opinion(lambda))
                                     : MapCoefficients(lambda, lambda, 0.0, 1.0, unbounded);
  NoiseModel noise;
  noise.epsilon_max = options.epsilon_max;
  noise.validate();

  std::vector<AgentState> initial(plan.replicas);
  Rng spread(plan.seed, StreamId{0, 0, stream_domain::initial_spread});
  for (auto& s : initial) {
    s = options.inject_spread
            ? AgentState::with_value(spread.uniform(options.spread_lo, options.spread_hi))
            : AgentState{};
  }

  // per_replica[r][k]: log m of replica r at checkpoint k.
  std::vector<std::vector<double>> per_replica(plan.replicas);
  parallel_for(plan.replicas, options.threads, [&](std::size_t r) {
    Rng rng(plan.seed, StreamId{0, options.shared_noise ? 0 : r});
    const auto states = evolve_checkpoints(initial[r], coeffs, noise, checkpoints, rng);
    per_replica[r].reserve(states.size());
    for (const auto& s : states) per_replica[r].push_back(s.log_m);
  });

  VarianceGrowth out;
  out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  std::vector<double> column(plan.replicas);
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    for (std::size_t r = 0; r < plan.replicas; ++r) column[r] = per_replica[r][k];
    const double lv = log_variance_of_exp(column);
    out.log_variance.push_back(lv);
    out.variance.push_back(std::exp(lv));
  }
  return out;
}

}  // namespace stochmap::analytics
