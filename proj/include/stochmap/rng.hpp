#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stochmap {

// SplitMix64 finalizer. Used to derive well-separated substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Identifies one independent random stream inside a run: agent index and
// replica index. Domain separates auxiliary streams (population setup,
// initial spreads, Lyapunov draws) from the agent streams.
struct StreamId {
  std::uint64_t agent = 0;
  std::uint64_t replica = 0;
  std::uint64_t domain = 0;
};

namespace stream_domain {
inline constexpr std::uint64_t agents = 0;
inline constexpr std::uint64_t population = 1;
inline constexpr std::uint64_t initial_spread = 2;
inline constexpr std::uint64_t lyapunov = 3;
}  // namespace stream_domain

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamId id) noexcept {
  std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
  k = mix64(k ^ (id.domain * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  k = mix64(k ^ (id.agent * 0xaef17502108ef2d9ULL + 0x3c6ef372fe94f82bULL));
  k = mix64(k ^ (id.replica * 0xdb4f0b9175ae2165ULL + 0xa54ff53a5f1d36f1ULL));
  return k;
}

// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key = 0) noexcept {
    std::uint64_t sm = key;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      word = mix64(sm);
    }
  }

  Rng(std::uint64_t seed, StreamId id) noexcept : Rng(stream_key(seed, id)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace stochmap
