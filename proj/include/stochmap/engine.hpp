#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/parallel.hpp"
#include "stochmap/rng.hpp"
#include "stochmap/types.hpp"

namespace stochmap {

inline const double log_underflow_threshold = std::log(underflow_threshold);

// Which coordinate of the state gets recorded.
enum class SampleSpace { linear, log };

// Draw order is fixed: epsilon, then xi. xi is skipped when the noise is
// coupled or when the additive term vanishes.
inline NoiseDraw draw_noise(Rng& rng, const MapCoefficients& coeffs, const NoiseModel& noise) {
  NoiseDraw draw;
  draw.coupled = noise.coupled;
  draw.epsilon = noise.epsilon_max * rng.uniform();
  if (noise.coupled) {
    draw.xi = draw.epsilon;
  } else if (!coeffs.multiplicative()) {
    draw.xi = rng.uniform();
  }
  return draw;
}

// One application of the map. Purely multiplicative maps (lambda3 = 0) also
// advance log_m exactly, so decays far below double range stay observable.
inline AgentState step(const AgentState& state, const MapCoefficients& coeffs,
                       const NoiseDraw& noise) {
  const double factor = coeffs.lambda1() + noise.epsilon * coeffs.lambda2();
  AgentState next = state;
  if (coeffs.multiplicative()) {
    double log_next = state.log_m + std::log(factor);
    if (coeffs.bounded()) log_next = std::min(log_next, coeffs.log_theta());
    next.log_m = log_next;
    if (log_next < log_underflow_threshold) {
      next.m = 0.0;
    } else if (state.m > 0.0) {
      next.m = std::min(factor * state.m, coeffs.theta());
    } else {
      next.m = std::min(std::exp(log_next), coeffs.theta());
    }
  } else {
    const double xi = noise.coupled ? noise.epsilon : noise.xi;
    next.m = std::min(factor * state.m + xi * coeffs.additive_scale(), coeffs.theta());
    next.log_m = std::log(next.m);
  }
  return next;
}

// Burn-in, then record every `stride` steps until plan.samples values are
// collected. record(const AgentState&) is called once per recorded sample.
template <typename Recorder>
AgentState run_trajectory(AgentState state, const MapCoefficients& coeffs,
                          const SimulationPlan& plan, const NoiseModel& noise, Rng& rng,
                          Recorder&& record) {
  for (std::uint64_t t = 0; t < plan.burn_in; ++t) {
    state = step(state, coeffs, draw_noise(rng, coeffs, noise));
  }
  for (std::size_t s = 0; s < plan.samples; ++s) {
    for (std::uint64_t k = 0; k < plan.stride; ++k) {
      state = step(state, coeffs, draw_noise(rng, coeffs, noise));
    }
    record(state);
  }
  return state;
}

// Single trajectory on stream (plan.seed, agent, replica).
inline std::vector<double> evolve(const AgentState& initial, const MapCoefficients& coeffs,
                                  const SimulationPlan& plan, const NoiseModel& noise = {},
                                  SampleSpace space = SampleSpace::linear,
                                  StreamId stream = {}) {
  plan.validate();
  noise.validate();
  Rng rng(plan.seed, stream);
  std::vector<double> out;
  out.reserve(plan.samples);
  if (space == SampleSpace::linear) {
    run_trajectory(initial, coeffs, plan, noise, rng,
                   [&](const AgentState& s) { out.push_back(s.m); });
  } else {
    run_trajectory(initial, coeffs, plan, noise, rng,
                   [&](const AgentState& s) { out.push_back(s.log_m); });
  }
  return out;
}

// plan.replicas independent trajectories of one agent, indexed by replica.
inline std::vector<std::vector<double>> evolve_ensemble(
    const AgentState& initial, const MapCoefficients& coeffs, const SimulationPlan& plan,
    const NoiseModel& noise = {}, SampleSpace space = SampleSpace::linear,
    unsigned threads = 1) {
  plan.validate();
  std::vector<std::vector<double>> out(plan.replicas);
  parallel_for(plan.replicas, threads, [&](std::size_t r) {
    out[r] = evolve(initial, coeffs, plan, noise, space, StreamId{0, r});
  });
  return out;
}

// Non-interacting agents, each on its own substream (seed, i, r). Agent i's
// sequence holds its replicas back to back: samples * replicas values.
inline std::vector<std::vector<double>> evolve_population(
    std::span<const AgentState> population, std::span<const MapCoefficients> coeffs,
    const SimulationPlan& plan, const NoiseModel& noise = {},
    SampleSpace space = SampleSpace::linear, unsigned threads = 1) {
  plan.validate();
  if (coeffs.size() != population.size()) {
    throw std::invalid_argument("one coefficient set per agent is required");
  }
  std::vector<std::vector<double>> out(population.size());
  parallel_for(population.size(), threads, [&](std::size_t i) {
    auto& series = out[i];
    series.reserve(plan.samples * plan.replicas);
    for (std::size_t r = 0; r < plan.replicas; ++r) {
      auto one = evolve(population[i], coeffs[i], plan, noise, space, StreamId{i, r});
      series.insert(series.end(), one.begin(), one.end());
    }
  });
  return out;
}

// State after each of the (ascending) checkpoint step counts.
inline std::vector<AgentState> evolve_checkpoints(AgentState state,
                                                  const MapCoefficients& coeffs,
                                                  const NoiseModel& noise,
                                                  std::span<const std::uint64_t> checkpoints,
                                                  Rng& rng) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be ascending");
  }
  std::vector<AgentState> out;
  out.reserve(checkpoints.size());
  std::uint64_t t = 0;
  for (std::uint64_t target : checkpoints) {
    for (; t < target; ++t) state = step(state, coeffs, draw_noise(rng, coeffs, noise));
    out.push_back(state);
  }
  return out;
}

// Final state of `replicas` independent runs of `steps` steps each,
// replica r on stream (seed, 0, r).
inline std::vector<AgentState> ensemble_final_states(const AgentState& initial,
                                                     const MapCoefficients& coeffs,
                                                     const NoiseModel& noise, std::uint64_t steps,
                                                     std::uint64_t seed, std::size_t replicas,
                                                     unsigned threads = 1) {
  noise.validate();
  std::vector<AgentState> out(replicas);
  const std::uint64_t checkpoint[] = {steps};
  parallel_for(replicas, threads, [&](std::size_t r) {
    Rng rng(seed, StreamId{0, r});
    out[r] = evolve_checkpoints(initial, coeffs, noise, checkpoint, rng).front();
  });
  return out;
}

inline std::vector<double> pool(const std::vector<std::vector<double>>& groups) {
  std::size_t total = 0;
  for (const auto& g : groups) total += g.size();
  std::vector<double> out;
  out.reserve(total);
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

}  // namespace stochmap
