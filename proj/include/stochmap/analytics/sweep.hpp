#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/moments.hpp"
#include "stochmap/engine.hpp"
#include "stochmap/regimes.hpp"

namespace stochmap::analytics {

// Order parameter and fluctuation curves over a lambda grid.
struct SweepResult {
  std::vector<double> lambda_grid;
  // Long-time <m> per lambda, pooled over replicas and recorded samples.
  std::vector<double> order_parameter;
  std::vector<double> variance;
  // log(lambda) + mean_log_one_plus_eps.
  std::vector<double> lyapunov;
  double mean_log_one_plus_eps = 0.0;
  std::size_t lyapunov_draws = 0;
};

struct SweepOptions {
  std::size_t lyapunov_draws = 1'000'000;
  unsigned threads = 1;
};

// Monte Carlo <log(1 + eps)>, eps ~ U[0, epsilon_max). Blocked so the
// reduction order is fixed without holding all draws in memory.
inline double estimate_mean_log_one_plus_eps(std::size_t draws, std::uint64_t seed,
                                             double epsilon_max = 1.0) {
  if (draws == 0) throw std::invalid_argument("at least one draw is required");
  constexpr std::size_t block = 1 << 16;
  Rng rng(seed, StreamId{0, 0, stream_domain::lyapunov});
  std::vector<double> block_sums;
  std::vector<double> buffer;
  buffer.reserve(block);
  std::size_t remaining = draws;
  while (remaining > 0) {
    const std::size_t k = std::min(block, remaining);
    buffer.clear();
    for (std::size_t i = 0; i < k; ++i) buffer.push_back(std::log1p(epsilon_max * rng.uniform()));
    block_sums.push_back(pairwise_sum(buffer));
    remaining -= k;
  }
  return pairwise_sum(block_sums) / static_cast<double>(draws);
}

inline void require_lambda_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] < 1.0)) {
      throw std::invalid_argument("lambda grid values must lie in [0, 1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("lambda grid must be strictly increasing");
    }
  }
}

// Runs plan.replicas trajectories of the regime at `lambda` and returns the
// pooled recorded samples.
inline std::vector<double> order_samples(const Regime& base, double lambda,
                                         const SimulationPlan& plan, unsigned threads = 1) {
  const Regime regime = base.with_lambda(lambda);
  return pool(evolve_ensemble(AgentState{}, make_coefficients(regime), plan, make_noise(regime),
                              SampleSpace::linear, threads));
}

inline SweepResult sweep_lambda(const Regime& base, std::span<const double> grid,
                                const SimulationPlan& plan, const SweepOptions& options = {}) {
  require_lambda_grid(grid);
  plan.validate();
  SweepResult out;
  out.lambda_grid.assign(grid.begin(), grid.end());
  out.order_parameter.resize(grid.size());
  out.variance.resize(grid.size());
  out.lyapunov.resize(grid.size());

  const std::size_t cells = grid.size() * plan.replicas;
  std::vector<std::vector<double>> runs(cells);
  parallel_for(cells, options.threads, [&](std::size_t c) {
    const std::size_t i = c / plan.replicas;
    const std::size_t r = c % plan.replicas;
    const Regime regime = base.with_lambda(grid[i]);
    runs[c] = evolve(AgentState{}, make_coefficients(regime), plan, make_noise(regime),
                     SampleSpace::linear, StreamId{0, r});
  });

  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> pooled;
    pooled.reserve(plan.samples * plan.replicas);
    for (std::size_t r = 0; r < plan.replicas; ++r) {
      const auto& run = runs[i * plan.replicas + r];
      pooled.insert(pooled.end(), run.begin(), run.end());
    }
    if (pooled.size() >= 2) {
      const MomentSummary s = moments(pooled);
      out.order_parameter[i] = s.mean;
      out.variance[i] = s.variance;
    } else {
      out.order_parameter[i] = pooled.front();
      out.variance[i] = 0.0;
    }
  }

  out.lyapunov_draws = options.lyapunov_draws;
  out.mean_log_one_plus_eps =
      estimate_mean_log_one_plus_eps(options.lyapunov_draws, plan.seed, base.epsilon_max);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.lyapunov[i] = std::log(grid[i]) + out.mean_log_one_plus_eps;
  }
  return out;
}

struct CriticalEstimate {
  double lambda_c_lyapunov = 0.0;
  double lambda_c_order = 0.0;
};

// Order parameter at a given lambda, used to refine the grid estimate.
using OrderProbe = std::function<double(double)>;

inline OrderProbe make_order_probe(const Regime& base, const SimulationPlan& plan,
                                   unsigned threads = 1) {
  return [base, plan, threads](double lambda) {
    return mean(order_samples(base, lambda, plan, threads));
  };
}

inline constexpr double default_order_threshold = 1e-3;
inline constexpr double default_order_precision = 1e-4;

// Lyapunov root exp(-<log(1+eps)>), and the lambda where the order parameter
// first exceeds `threshold`: the midpoint of the bracketing grid interval,
// bisected with `probe` down to `precision` when a probe is given.
inline CriticalEstimate estimate_critical_lambda(const SweepResult& sweep,
                                                 const OrderProbe& probe = {},
                                                 double threshold = default_order_threshold,
                                                 double precision = default_order_precision) {
  const auto& grid = sweep.lambda_grid;
  if (grid.size() < 2) throw std::domain_error("sweep needs at least 2 grid points");

  bool sign_change = false;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (sweep.lyapunov[i] < 0.0 && sweep.lyapunov[i + 1] >= 0.0) sign_change = true;
  }
  if (!sign_change) throw std::domain_error("no Lyapunov sign change in the grid range");

  CriticalEstimate est;
  est.lambda_c_lyapunov = std::exp(-sweep.mean_log_one_plus_eps);

  std::size_t first = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (sweep.order_parameter[i] > threshold) {
      first = i;
      break;
    }
  }
  if (first == grid.size() || first == 0) {
    throw std::domain_error("order parameter does not cross the threshold inside the grid");
  }
  double lo = grid[first - 1];
  double hi = grid[first];
  if (probe) {
    while (hi - lo > precision) {
      const double mid = 0.5 * (lo + hi);
      if (probe(mid) > threshold) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  est.lambda_c_order = 0.5 * (lo + hi);
  return est;
}

}  // namespace stochmap::analytics
