#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stochmap/rng.hpp"
#include "stochmap/types.hpp"

namespace stochmap {

enum class RegimeTag { skewed_independent, skewed_coupled, power_law, opinion, gibrat };

inline std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::skewed_independent: return "skewed_independent";
    case RegimeTag::skewed_coupled: return "skewed_coupled";
    case RegimeTag::power_law: return "power_law";
    case RegimeTag::opinion: return "opinion";
    case RegimeTag::gibrat: return "gibrat";
  }
  return "unknown";
}

inline std::optional<RegimeTag> parse_regime_tag(std::string_view name) {
  for (auto tag : {RegimeTag::skewed_independent, RegimeTag::skewed_coupled,
                   RegimeTag::power_law, RegimeTag::opinion, RegimeTag::gibrat}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

// A named parameterization of the map. lambda is ignored by gibrat; n is only
// read by power_law.
struct Regime {
  RegimeTag tag = RegimeTag::skewed_independent;
  double lambda = 0.0;
  double n = 1.0;
  // Upper end of the epsilon draw. Only gibrat and opinion runs change it.
  double epsilon_max = 1.0;

  static Regime skewed_independent(double lambda) { return {RegimeTag::skewed_independent, lambda}; }
  static Regime skewed_coupled(double lambda) { return {RegimeTag::skewed_coupled, lambda}; }
  static Regime power_law(double lambda, double n) { return {RegimeTag::power_law, lambda, n}; }
  static Regime opinion(double lambda) { return {RegimeTag::opinion, lambda}; }
  static Regime gibrat(double epsilon_max = 1.0) {
    return {RegimeTag::gibrat, 1.0, 1.0, epsilon_max};
  }

  Regime with_lambda(double l) const {
    Regime r = *this;
    r.lambda = l;
    return r;
  }
};

inline MapCoefficients make_coefficients(const Regime& regime) {
  detail::require(detail::in_unit_interval(regime.lambda), "lambda must lie in [0, 1]");
  const double l = regime.lambda;
  switch (regime.tag) {
    case RegimeTag::skewed_independent:
    case RegimeTag::skewed_coupled:
      return {l, 1.0 - l, 1.0 - l, 1.0, unbounded};
    case RegimeTag::power_law:
      detail::require(regime.n <= 0.0, "power_law requires n <= 0");
      return {l, 1.0 - l, 1.0 - l, regime.n, unbounded};
    case RegimeTag::opinion:
      return {l, l, 0.0, 1.0, 1.0};
    case RegimeTag::gibrat:
      return {1.0, 1.0, 0.0, 1.0, unbounded};
  }
  throw std::invalid_argument("unknown regime");
}

inline NoiseModel make_noise(const Regime& regime) {
  NoiseModel noise;
  noise.coupled = regime.tag == RegimeTag::skewed_coupled;
  noise.epsilon_max = regime.epsilon_max;
  noise.validate();
  return noise;
}

// Upper bound for uniform lambda draws; keeps (1 - lambda)^(n - 1) finite.
inline constexpr double max_uniform_lambda = 1.0 - 0x1.0p-20;

enum class LambdaSchemeKind { constant, uniform_random, deterministic_ramp };

struct LambdaScheme {
  LambdaSchemeKind kind = LambdaSchemeKind::constant;
  double value = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  double lambda_max = 0.0;

  static LambdaScheme constant(double v) {
    return {LambdaSchemeKind::constant, v, 0.0, 1.0, 0.0};
  }
  static LambdaScheme uniform(double lo, double hi) {
    return {LambdaSchemeKind::uniform_random, 0.0, lo, hi, 0.0};
  }
  static LambdaScheme ramp(double lambda_max) {
    return {LambdaSchemeKind::deterministic_ramp, 0.0, 0.0, 1.0, lambda_max};
  }

  void validate() const {
    switch (kind) {
      case LambdaSchemeKind::constant:
        detail::require(value >= 0.0 && value < 1.0, "constant lambda must lie in [0, 1)");
        break;
      case LambdaSchemeKind::uniform_random:
        detail::require(lo >= 0.0 && hi <= 1.0 && lo <= hi,
                        "uniform lambda range must satisfy 0 <= lo <= hi <= 1");
        detail::require(lo < max_uniform_lambda, "uniform lambda range must start below 1");
        break;
      case LambdaSchemeKind::deterministic_ramp:
        detail::require(lambda_max > 0.0 && lambda_max < 1.0,
                        "lambda_max must lie in (0, 1)");
        break;
    }
  }
};

// N agents at m = 1 with lambda assigned by the scheme. Uniform draws come
// from a dedicated population stream, so agent dynamics streams are untouched.
inline std::vector<AgentState> build_population(std::size_t count, const LambdaScheme& scheme,
                                                std::uint64_t seed) {
  detail::require(count >= 1, "population size must be at least 1");
  scheme.validate();
  std::vector<AgentState> agents(count);
  Rng rng(seed, StreamId{0, 0, stream_domain::population});
  const double hi = std::min(scheme.hi, max_uniform_lambda);
  for (std::size_t i = 0; i < count; ++i) {
    double l = 0.0;
    switch (scheme.kind) {
      case LambdaSchemeKind::constant:
        l = scheme.value;
        break;
      case LambdaSchemeKind::uniform_random:
        l = rng.uniform(scheme.lo, hi);
        break;
      case LambdaSchemeKind::deterministic_ramp:
        l = static_cast<double>(i + 1) / static_cast<double>(count) * scheme.lambda_max;
        break;
    }
    agents[i] = AgentState{1.0, l, 0.0};
  }
  if (scheme.kind == LambdaSchemeKind::deterministic_ramp) agents.back().lambda = scheme.lambda_max;
  return agents;
}

// Per-agent coefficients: the regime template evaluated at each agent's lambda.
inline std::vector<MapCoefficients> population_coefficients(const Regime& base,
                                                            std::span<const AgentState> agents) {
  std::vector<MapCoefficients> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(make_coefficients(base.with_lambda(a.lambda)));
  return out;
}

}  // namespace stochmap
