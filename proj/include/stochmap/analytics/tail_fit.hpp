#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "stochmap/analytics/histogram.hpp"
#include "stochmap/analytics/moments.hpp"

namespace stochmap::analytics {

enum class TailMethod { hill, loglog_regression };

inline std::string_view to_string(TailMethod m) {
  return m == TailMethod::hill ? "hill" : "loglog_regression";
}

inline std::optional<TailMethod> parse_tail_method(std::string_view name) {
  if (name == "hill") return TailMethod::hill;
  if (name == "loglog_regression") return TailMethod::loglog_regression;
  return std::nullopt;
}

// Lower cutoff of the tail: a fixed value, or a quantile of the sample
// (default: 90th percentile). xmax optionally bounds the regression window.
struct XminRule {
  std::optional<double> value;
  double quantile = 0.9;
  std::optional<double> xmax;

  static XminRule at_quantile(double q) { return {std::nullopt, q, std::nullopt}; }
  static XminRule at_value(double x) { return {x, 0.9, std::nullopt}; }

  XminRule& up_to(double x) {
    xmax = x;
    return *this;
  }
};

struct TailFit {
  // Density exponent a in P(m) ~ m^(-a).
  double exponent = 0.0;
  double xmin = 0.0;
  double standard_error = 0.0;
  std::size_t n_tail = 0;
  TailMethod method = TailMethod::hill;
};

inline constexpr std::size_t min_tail_samples = 10;

// Log-binned regression uses at least this many bins per decade.
inline constexpr double regression_bins_per_decade = 8.0;

// Linear-interpolated sample quantile (type 7).
inline double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[j] - sorted[i]);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("a line fit needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("a line fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

// Hill: a = 1 + k / sum log(x_i / xmin) over the k samples >= xmin.
// Regression: negated slope of log density against log bin center, from a
// log-binned histogram of the samples in [xmin, xmax].
inline TailFit fit_tail(std::span<const double> samples, const XminRule& rule = {},
                        TailMethod method = TailMethod::hill) {
  if (samples.empty()) throw std::invalid_argument("tail fit of an empty sample");
  const double xmin = rule.value ? *rule.value : quantile(samples, rule.quantile);
  if (!(xmin > 0.0)) throw std::invalid_argument("xmin must be positive");
  const double xmax = rule.xmax.value_or(std::numeric_limits<double>::infinity());
  if (!(xmax > xmin)) throw std::invalid_argument("xmax must exceed xmin");

  std::vector<double> tail;
  for (double x : samples) {
    if (x >= xmin && x <= xmax) tail.push_back(x);
  }
  if (tail.size() < min_tail_samples) {
    throw std::invalid_argument("too few samples above xmin");
  }

  TailFit fit;
  fit.xmin = xmin;
  fit.n_tail = tail.size();
  fit.method = method;

  if (method == TailMethod::hill) {
    const double log_sum = pairwise_sum(tail, [xmin](double x) { return std::log(x / xmin); });
    if (!(log_sum > 0.0)) throw std::invalid_argument("all tail samples equal xmin");
    const double k = static_cast<double>(tail.size());
    fit.exponent = 1.0 + k / log_sum;
    fit.standard_error = (fit.exponent - 1.0) / std::sqrt(k);
    return fit;
  }

  const double top = std::isfinite(xmax) ? xmax : *std::max_element(tail.begin(), tail.end());
  if (!(top > xmin)) throw std::invalid_argument("all tail samples equal xmin");
  const double decades = std::log10(top / xmin);
  const auto bins = static_cast<std::size_t>(
      std::max(3.0, std::ceil(regression_bins_per_decade * decades)));
  const Histogram h = histogram(tail, bins, Binning::log, xmin, top);
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    if (h.counts[b] == 0) continue;
    lx.push_back(std::log(h.center(b)));
    ly.push_back(std::log(h.density[b]));
  }
  if (lx.size() < 3) throw std::invalid_argument("too few occupied bins above xmin");
  const LineFit line = least_squares(lx, ly);
  fit.exponent = -line.slope;
  fit.standard_error = line.slope_stderr;
  return fit;
}

}  // namespace stochmap::analytics
