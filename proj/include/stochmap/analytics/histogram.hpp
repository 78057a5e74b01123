#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace stochmap::analytics {

enum class Binning { linear, log };

inline std::optional<Binning> parse_binning(std::string_view name) {
  if (name == "linear") return Binning::linear;
  if (name == "log") return Binning::log;
  return std::nullopt;
}

// Density estimate of P(m). density integrates to 1 over the binned range;
// samples outside [edges.front(), edges.back()] are not counted.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::vector<double> density;
  Binning binning = Binning::linear;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }

  // Arithmetic midpoint for linear bins, geometric for log bins.
  double center(std::size_t b) const {
    return binning == Binning::log ? std::sqrt(edges[b] * edges[b + 1])
                                   : 0.5 * (edges[b] + edges[b + 1]);
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  // Index of the bin holding x, or nullopt outside the range. The last bin
  // is closed on the right.
  std::optional<std::size_t> bin_of(double x) const {
    if (!(x >= edges.front() && x <= edges.back())) return std::nullopt;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : b - 1;
    return std::min(b, bins() - 1);
  }

  double density_at(double x) const {
    auto b = bin_of(x);
    if (!b) throw std::out_of_range("value outside the histogram range");
    return density[*b];
  }

  double integral() const {
    double s = 0.0;
    for (std::size_t b = 0; b < bins(); ++b) s += density[b] * width(b);
    return s;
  }
};

namespace detail {

inline std::vector<double> make_edges(double lo, double hi, std::size_t bins, Binning binning) {
  std::vector<double> edges(bins + 1);
  if (binning == Binning::linear) {
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + w * static_cast<double>(i);
  } else {
    const double llo = std::log(lo);
    const double lw = (std::log(hi) - llo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = std::exp(llo + lw * static_cast<double>(i));
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

inline std::size_t locate(double x, double lo, double hi, std::size_t bins, Binning binning,
                          const std::vector<double>& edges) {
  double t = binning == Binning::linear ? (x - lo) / (hi - lo)
                                        : std::log(x / lo) / std::log(hi / lo);
  auto b = static_cast<std::size_t>(std::clamp(t, 0.0, 1.0) * static_cast<double>(bins));
  b = std::min(b, bins - 1);
  // Guard rounding at computed edges.
  while (b > 0 && x < edges[b]) --b;
  while (b + 1 < bins && x >= edges[b + 1]) ++b;
  return b;
}

}  // namespace detail

// Histogram over an explicit range [lo, hi].
inline Histogram histogram(std::span<const double> samples, std::size_t bins, Binning binning,
                           double lo, double hi) {
  if (samples.empty()) throw std::invalid_argument("histogram of an empty sample");
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("histogram range must be finite with hi > lo");
  }
  if (binning == Binning::log && !(lo > 0.0)) {
    throw std::invalid_argument("log binning requires a positive range");
  }
  Histogram h;
  h.binning = binning;
  h.edges = detail::make_edges(lo, hi, bins, binning);
  h.counts.assign(bins, 0);
  for (double x : samples) {
    if (!(x >= lo && x <= hi)) continue;
    ++h.counts[detail::locate(x, lo, hi, bins, binning, h.edges)];
  }
  const double total = static_cast<double>(h.total());
  h.density.assign(bins, 0.0);
  if (total > 0.0) {
    for (std::size_t b = 0; b < bins; ++b) {
      h.density[b] = static_cast<double>(h.counts[b]) / (total * h.width(b));
    }
  }
  return h;
}

// Histogram over [min, max] of the sample. A degenerate sample (all values
// equal) gets one unit-scale bin around the value.
inline Histogram histogram(std::span<const double> samples, std::size_t bins,
                           Binning binning = Binning::linear) {
  if (samples.empty()) throw std::invalid_argument("histogram of an empty sample");
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *min_it;
  double hi = *max_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("histogram samples must be finite");
  }
  if (binning == Binning::log && !(lo > 0.0)) {
    throw std::invalid_argument("log binning requires strictly positive samples");
  }
  if (lo == hi) {
    if (binning == Binning::linear) {
      const double half = 0.5 * std::max(std::abs(lo), 1.0);
      lo -= half;
      hi += half;
    } else {
      lo /= 2.0;
      hi *= 2.0;
    }
  }
  return histogram(samples, bins, binning, lo, hi);
}

}  // namespace stochmap::analytics
