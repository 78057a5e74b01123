#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace stochmap {

// Sentinel for an absent upper cap on m.
inline constexpr double unbounded = std::numeric_limits<double>::infinity();

// Largest |n| the engine accepts. Stand-in for the n -> -infinity limit.
inline constexpr double max_abs_exponent = 100.0;

// Below this the direct-space value reports 0 and log_m carries the state.
inline constexpr double underflow_threshold = 1e-300;

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace detail

// Coefficients of m(t) = min{(l1 + eps*l2) m(t-1) + xi * l3^n, theta}.
//
// The savings constraint l1 + l2 <= 1 applies to the uncapped maps with an
// additive term. Capped maps (opinion, theta finite) and purely
// multiplicative maps (l3 = 0, e.g. proportional growth) may exceed it.
class MapCoefficients {
 public:
  MapCoefficients(double lambda1, double lambda2, double lambda3, double n,
                  double theta = unbounded)
      : lambda1_(lambda1),
        lambda2_(lambda2),
        lambda3_(lambda3),
        n_(n),
        theta_(theta) {
    detail::require(detail::in_unit_interval(lambda1_), "lambda1 must lie in [0, 1]");
    detail::require(detail::in_unit_interval(lambda2_), "lambda2 must lie in [0, 1]");
    detail::require(detail::in_unit_interval(lambda3_), "lambda3 must lie in [0, 1]");
    detail::require(std::isfinite(n_), "n must be finite");
    detail::require(n_ <= 1.0 && n_ >= -max_abs_exponent, "n must lie in [-100, 1]");
    detail::require(theta_ > 0.0 && !std::isnan(theta_),
                    "theta must be positive or unbounded");
    if (!bounded() && lambda3_ > 0.0) {
      detail::require(lambda1_ + lambda2_ <= 1.0,
                      "lambda1 + lambda2 must not exceed 1 for an uncapped map");
    }
    additive_ = lambda3_ == 0.0 ? 0.0 : std::pow(lambda3_, n_);
    detail::require(std::isfinite(additive_), "lambda3^n overflows");
    log_theta_ = bounded() ? std::log(theta_) : unbounded;
  }

  double lambda1() const noexcept { return lambda1_; }
  double lambda2() const noexcept { return lambda2_; }
  double lambda3() const noexcept { return lambda3_; }
  double n() const noexcept { return n_; }
  double theta() const noexcept { return theta_; }
  double log_theta() const noexcept { return log_theta_; }
  bool bounded() const noexcept { return std::isfinite(theta_); }

  // lambda3^n, identically 0 when lambda3 = 0.
  double additive_scale() const noexcept { return additive_; }
  bool multiplicative() const noexcept { return lambda3_ == 0.0; }

  friend bool operator==(const MapCoefficients&, const MapCoefficients&) = default;

 private:
  double lambda1_;
  double lambda2_;
  double lambda3_;
  double n_;
  double theta_;
  double additive_ = 0.0;
  double log_theta_ = unbounded;
};

struct AgentState {
  double m = 1.0;
  double lambda = 0.0;
  // Authoritative when m has underflowed to 0.
  double log_m = 0.0;

  static AgentState with_value(double m, double lambda = 0.0) {
    detail::require(m >= 0.0 && std::isfinite(m), "m must be finite and non-negative");
    return {m, lambda, std::log(m)};
  }
};

struct NoiseDraw {
  double epsilon = 0.0;
  double xi = 0.0;
  bool coupled = false;
};

// How the per-step noise is drawn. epsilon ~ U[0, epsilon_max), xi ~ U[0, 1)
// unless coupled, in which case xi is epsilon.
struct NoiseModel {
  double epsilon_max = 1.0;
  bool coupled = false;

  void validate() const {
    detail::require(epsilon_max > 0.0 && std::isfinite(epsilon_max),
                    "epsilon_max must be positive and finite");
  }
};

struct SimulationPlan {
  std::uint64_t seed = 1;
  std::uint64_t burn_in = 10'000;
  std::size_t samples = 100'000;
  std::uint64_t stride = 1;
  std::size_t replicas = 1;

  void validate() const {
    detail::require(samples >= 1, "samples must be at least 1");
    detail::require(stride >= 1, "stride must be at least 1");
    detail::require(replicas >= 1, "replicas must be at least 1");
  }

  std::uint64_t total_steps() const noexcept { return burn_in + samples * stride; }
};

}  // namespace stochmap
