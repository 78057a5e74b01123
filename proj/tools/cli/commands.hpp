#pragma once

#include <charconv>
#include <cstdint>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "stochmap/stochmap.hpp"

namespace stochmap::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid = 2;
inline constexpr int io = 3;
}  // namespace exit_code

struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  unsigned threads = 0;
};

// Shortest round-trip decimal form, independent of the global locale.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("error while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

inline std::string histogram_csv(const analytics::Histogram& h) {
  std::string out = "bin_left,bin_right,density,count\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    out += format_number(h.edges[b]);
    out += ',';
    out += format_number(h.edges[b + 1]);
    out += ',';
    out += format_number(h.density[b]);
    out += ',';
    out += std::to_string(h.counts[b]);
    out += '\n';
  }
  return out;
}

inline std::string sweep_csv(const analytics::SweepResult& s) {
  std::string out = "lambda,order_parameter,variance,lyapunov\n";
  for (std::size_t i = 0; i < s.lambda_grid.size(); ++i) {
    out += format_number(s.lambda_grid[i]) + ',' + format_number(s.order_parameter[i]) + ',' +
           format_number(s.variance[i]) + ',' + format_number(s.lyapunov[i]) + '\n';
  }
  return out;
}

inline RunConfig resolve_config(const CommonOptions& opts, bool require_regime) {
  RunConfig cfg;
  if (opts.config) {
    cfg = load_config(*opts.config, require_regime);
  } else if (require_regime) {
    throw ConfigError("--config", "a config file is required");
  }
  if (opts.seed) cfg.plan.seed = *opts.seed;
  return cfg;
}

// Pooled samples of the configured single agent (all replicas) or population.
inline std::vector<double> simulate_samples(const RunConfig& cfg, unsigned threads) {
  const NoiseModel noise = make_noise(cfg.regime);
  if (cfg.population) {
    const auto agents =
        build_population(cfg.population->size, cfg.population->scheme, cfg.plan.seed);
    std::vector<MapCoefficients> coeffs;
    detail::check("population", [&] { coeffs = population_coefficients(cfg.regime, agents); });
    return pool(evolve_population(agents, coeffs, cfg.plan, noise, SampleSpace::linear, threads));
  }
  return pool(evolve_ensemble(AgentState{}, make_coefficients(cfg.regime), cfg.plan, noise,
                              SampleSpace::linear, threads));
}

inline int cmd_simulate(const CommonOptions& opts, std::ostream& log) {
  const RunConfig cfg = resolve_config(opts, true);
  const auto samples = simulate_samples(cfg, opts.threads);

  for (double x : samples) {
    if (!std::isfinite(x)) throw ConfigError("plan", "samples overflow double range; use fewer steps");
  }

  analytics::Histogram hist;
  detail::check("histogram", [&] {
    hist = analytics::histogram(samples, cfg.histogram.bins, cfg.histogram.binning);
  });
  const analytics::MomentSummary m = samples.size() >= 2
                                         ? analytics::moments(samples)
                                         : analytics::MomentSummary{1, samples.front()};

  for (double v : {m.mean, m.variance, m.skewness, m.excess_kurtosis}) {
    if (!std::isfinite(v)) {
      throw ConfigError("plan", "sample moments overflow double range; use fewer steps");
    }
  }

  json summary;
  summary["regime"] = std::string(to_string(cfg.regime.tag));
  summary["lambda"] = cfg.population ? json(nullptr) : json(cfg.regime.lambda);
  summary["n"] = cfg.regime.n;
  summary["seed"] = cfg.plan.seed;
  summary["count"] = m.count;
  summary["mean"] = m.mean;
  summary["variance"] = m.variance;
  summary["skewness"] = m.skewness;
  summary["kurtosis"] = m.excess_kurtosis;

  write_atomic(opts.out / cfg.output.histogram, histogram_csv(hist));
  write_atomic(opts.out / cfg.output.summary, summary.dump(2) + "\n");
  if (cfg.output.samples) {
    std::string text;
    text.reserve(samples.size() * 20);
    for (double x : samples) text += format_number(x) + '\n';
    write_atomic(opts.out / *cfg.output.samples, text);
  }
  log << summary.dump(2) << '\n';
  return exit_code::ok;
}

inline int cmd_sweep(const CommonOptions& opts, std::ostream& log) {
  const RunConfig cfg = resolve_config(opts, true);
  if (cfg.sweep.grid.empty()) throw ConfigError("sweep.grid", "is required");

  analytics::SweepOptions so;
  so.lyapunov_draws = cfg.sweep.lyapunov_draws;
  so.threads = opts.threads;
  const auto result = analytics::sweep_lambda(cfg.regime, cfg.sweep.grid, cfg.plan, so);

  analytics::CriticalEstimate est;
  detail::check("sweep.grid", [&] {
    const auto probe = cfg.sweep.refine
                           ? analytics::make_order_probe(cfg.regime, cfg.plan, opts.threads)
                           : analytics::OrderProbe{};
    est = analytics::estimate_critical_lambda(result, probe, cfg.sweep.threshold,
                                              cfg.sweep.precision);
  });

  json side;
  side["lambda_c_lyapunov"] = est.lambda_c_lyapunov;
  side["lambda_c_order"] = est.lambda_c_order;
  side["mean_log_one_plus_eps"] = result.mean_log_one_plus_eps;
  side["lyapunov_draws"] = result.lyapunov_draws;
  side["threshold"] = cfg.sweep.threshold;
  side["regime"] = std::string(to_string(cfg.regime.tag));
  side["seed"] = cfg.plan.seed;

  write_atomic(opts.out / cfg.output.sweep, sweep_csv(result));
  write_atomic(opts.out / cfg.output.sweep_summary, side.dump(2) + "\n");
  log << side.dump(2) << '\n';
  return exit_code::ok;
}

inline std::vector<double> read_samples(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') {
      double v = 0.0;
      auto res = std::from_chars(line.data(), line.data() + line.size(), v);
      if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
        throw ConfigError("samples", "line " + std::to_string(line_no) + " is not a number");
      }
      out.push_back(v);
    }
    pos = end + 1;
  }
  if (out.empty()) throw ConfigError("samples", "file holds no samples");
  return out;
}

inline json tail_fit_json(const analytics::TailFit& fit) {
  json j;
  j["exponent"] = fit.exponent;
  j["xmin"] = fit.xmin;
  j["stderr"] = fit.standard_error;
  j["n_tail"] = fit.n_tail;
  j["method"] = std::string(analytics::to_string(fit.method));
  return j;
}

inline int cmd_fit(const std::filesystem::path& samples_path, const CommonOptions& opts,
                   std::ostream& out) {
  const RunConfig cfg = resolve_config(opts, false);
  const auto samples = read_samples(samples_path);
  analytics::TailFit fit;
  detail::check("fit", [&] { fit = analytics::fit_tail(samples, cfg.fit.rule, cfg.fit.method); });
  const std::string text = tail_fit_json(fit).dump(2) + "\n";
  write_atomic(opts.out / cfg.output.fit, text);
  out << text;
  return exit_code::ok;
}

inline int cmd_oracle(const std::string& name, std::span<const double> params, std::ostream& out) {
  oracle::OracleValue v;
  detail::check("oracle", [&] { v = oracle::lookup(name, params); });
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v.value, std::chars_format::general, 17);
  out << std::string(buf, res.ptr) << '\n' << v.source << '\n';
  return exit_code::ok;
}

}  // namespace stochmap::cli
