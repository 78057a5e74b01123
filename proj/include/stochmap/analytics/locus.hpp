#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochmap/analytics/histogram.hpp"
#include "stochmap/analytics/moments.hpp"
#include "stochmap/analytics/tail_fit.hpp"

namespace stochmap::analytics {

struct LocusPoint {
  double mean_m = 0.0;
  double density_at_mean = 0.0;
};

inline constexpr std::size_t min_locus_group = 1000;

// For each lambda group: its mean and its own histogram density at that mean.
inline std::vector<LocusPoint> conditional_density_locus(
    std::span<const std::vector<double>> groups, std::size_t bins = 100) {
  std::vector<LocusPoint> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() < min_locus_group) {
      throw std::invalid_argument("each lambda group needs at least 1000 samples");
    }
    const double mu = mean(g);
    const Histogram h = histogram(g, bins, Binning::linear);
    const auto b = h.bin_of(mu);
    if (!b) throw std::out_of_range("group mean lies outside its histogram range");
    out.push_back({mu, h.density[*b]});
  }
  return out;
}

// Slope of log density_at_mean against log mean_m.
inline LineFit locus_slope(std::span<const LocusPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("a locus slope needs at least 2 groups");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.mean_m > 0.0 && p.density_at_mean > 0.0)) {
      throw std::invalid_argument("locus points must be positive");
    }
    x.push_back(std::log(p.mean_m));
    y.push_back(std::log(p.density_at_mean));
  }
  return least_squares(x, y);
}

}  // namespace stochmap::analytics
