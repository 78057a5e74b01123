#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/histogram.hpp"
#include "stochmap/analytics/tail_fit.hpp"

namespace stochmap::analytics {

struct SlopeSpanOptions {
  double bins_per_decade = 10.0;
  // Consecutive log bins per local regression.
  std::size_t window = 5;
  double tolerance = 0.2;
};

struct LocalSlope {
  double log10_center = 0.0;
  double slope = 0.0;
};

// Slope of log density against log m over each run of `window` consecutive
// occupied log bins spanning the sample range.
inline std::vector<LocalSlope> local_slopes(std::span<const double> samples,
                                            const SlopeSpanOptions& options = {}) {
  if (options.window < 2) throw std::invalid_argument("slope window needs at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  if (samples.empty() || !(*lo_it > 0.0)) {
    throw std::invalid_argument("local slopes need strictly positive samples");
  }
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw std::invalid_argument("local slopes need a non-degenerate sample");
  const auto bins = static_cast<std::size_t>(
      std::max<double>(options.window, std::ceil(options.bins_per_decade * std::log10(hi / lo))));
  const Histogram h = histogram(samples, bins, Binning::log, lo, hi);

  std::vector<LocalSlope> out;
  std::vector<double> x(options.window), y(options.window);
  for (std::size_t b = 0; b + options.window <= h.bins(); ++b) {
    bool occupied = true;
    for (std::size_t k = 0; k < options.window; ++k) {
      if (h.counts[b + k] == 0) {
        occupied = false;
        break;
      }
      x[k] = std::log(h.center(b + k));
      y[k] = std::log(h.density[b + k]);
    }
    if (!occupied) continue;
    const double mid = 0.5 * (x.front() + x.back()) / std::log(10.0);
    out.push_back({mid, least_squares(x, y).slope});
  }
  return out;
}

// Width in decades of the longest contiguous stretch where the local slope
// stays within tolerance of -exponent.
inline double power_law_span_decades(std::span<const double> samples, double exponent,
                                     const SlopeSpanOptions& options = {}) {
  const auto slopes = local_slopes(samples, options);
  const double step = 1.0 / options.bins_per_decade;
  double best = 0.0;
  double run = 0.0;
  double prev = 0.0;
  for (const auto& s : slopes) {
    const bool inside = std::abs(s.slope + exponent) <= options.tolerance;
    const bool contiguous = run > 0.0 && s.log10_center - prev < 1.5 * step;
    if (inside) {
      run = contiguous ? run + (s.log10_center - prev) : step;
      best = std::max(best, run);
    } else {
      run = 0.0;
    }
    prev = s.log10_center;
  }
  return best;
}

}  // namespace stochmap::analytics
