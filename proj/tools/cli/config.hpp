#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stochmap/analytics/histogram.hpp"
#include "stochmap/analytics/sweep.hpp"
#include "stochmap/analytics/tail_fit.hpp"
#include "stochmap/regimes.hpp"
#include "stochmap/types.hpp"

namespace stochmap::cli {

using json = nlohmann::json;

// Invalid configuration; field() names the offending key path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PopulationConfig {
  std::size_t size = 200;
  LambdaScheme scheme = LambdaScheme::uniform(0.0, 1.0);
};

struct HistogramConfig {
  std::size_t bins = 50;
  analytics::Binning binning = analytics::Binning::linear;
};

struct FitConfig {
  analytics::TailMethod method = analytics::TailMethod::hill;
  analytics::XminRule rule;
};

struct SweepConfig {
  std::vector<double> grid;
  std::size_t lyapunov_draws = 1'000'000;
  double threshold = analytics::default_order_threshold;
  bool refine = true;
  double precision = analytics::default_order_precision;
};

struct OutputConfig {
  std::string histogram = "hist.csv";
  std::string summary = "summary.json";
  std::string sweep = "sweep.csv";
  std::string sweep_summary = "sweep.json";
  std::string fit = "fit.json";
  // Optional dump of the pooled samples, one per line.
  std::optional<std::string> samples;
};

struct RunConfig {
  Regime regime;
  SimulationPlan plan;
  std::optional<PopulationConfig> population;
  HistogramConfig histogram;
  FitConfig fit;
  SweepConfig sweep;
  OutputConfig output;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline double get_number(const json& obj, const std::string& path, std::string_view key,
                         double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(join(path, key), "must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError(join(path, key), "must be finite");
  return v;
}

inline std::uint64_t get_count(const json& obj, const std::string& path, std::string_view key,
                               std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
    throw ConfigError(join(path, key), "must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

inline std::string get_string(const json& obj, const std::string& path, std::string_view key,
                              std::string fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(join(path, key), "must be a string");
  return it->get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& path, std::string_view key,
                     bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(join(path, key), "must be true or false");
  return it->get<bool>();
}

// Runs a module-level validation and rethrows its message under `field`.
template <typename Fn>
void check(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

inline Regime parse_regime(const json& j) {
  const std::string path = "regime";
  reject_unknown(j, path, {"tag", "lambda", "n", "epsilon_max"});
  auto it = j.find("tag");
  if (it == j.end()) throw ConfigError("regime.tag", "is required");
  if (!it->is_string()) throw ConfigError("regime.tag", "must be a string");
  const auto tag = parse_regime_tag(it->get<std::string>());
  if (!tag) throw ConfigError("regime.tag", "unknown regime '" + it->get<std::string>() + "'");
  Regime r;
  r.tag = *tag;
  r.lambda = get_number(j, path, "lambda", *tag == RegimeTag::gibrat ? 1.0 : 0.0);
  r.n = get_number(j, path, "n", *tag == RegimeTag::power_law ? 0.0 : 1.0);
  r.epsilon_max = get_number(j, path, "epsilon_max", 1.0);
  if (!(r.lambda >= 0.0 && r.lambda <= 1.0)) throw ConfigError("regime.lambda", "must lie in [0, 1]");
  if (*tag == RegimeTag::power_law && r.n > 0.0) throw ConfigError("regime.n", "power_law requires n <= 0");
  if (r.n < -max_abs_exponent || r.n > 1.0) throw ConfigError("regime.n", "must lie in [-100, 1]");
  if (!(r.epsilon_max > 0.0)) throw ConfigError("regime.epsilon_max", "must be positive");
  check("regime", [&] { (void)make_coefficients(r); });
  return r;
}

inline SimulationPlan parse_plan(const json& j) {
  const std::string path = "plan";
  reject_unknown(j, path, {"seed", "burn_in", "samples", "stride", "replicas"});
  SimulationPlan p;
  p.seed = get_count(j, path, "seed", p.seed);
  p.burn_in = get_count(j, path, "burn_in", p.burn_in);
  p.samples = get_count(j, path, "samples", p.samples);
  p.stride = get_count(j, path, "stride", p.stride);
  p.replicas = get_count(j, path, "replicas", p.replicas);
  if (p.samples < 1) throw ConfigError("plan.samples", "must be at least 1");
  if (p.stride < 1) throw ConfigError("plan.stride", "must be at least 1");
  if (p.replicas < 1) throw ConfigError("plan.replicas", "must be at least 1");
  return p;
}

inline PopulationConfig parse_population(const json& j) {
  const std::string path = "population";
  reject_unknown(j, path, {"size", "scheme", "value", "lo", "hi", "lambda_max"});
  PopulationConfig pc;
  pc.size = get_count(j, path, "size", pc.size);
  if (pc.size < 1) throw ConfigError("population.size", "must be at least 1");
  const std::string scheme = get_string(j, path, "scheme", "uniform");
  if (scheme == "constant") {
    pc.scheme = LambdaScheme::constant(get_number(j, path, "value", 0.0));
  } else if (scheme == "uniform") {
    pc.scheme = LambdaScheme::uniform(get_number(j, path, "lo", 0.0), get_number(j, path, "hi", 1.0));
  } else if (scheme == "ramp") {
    if (!j.contains("lambda_max")) throw ConfigError("population.lambda_max", "is required for ramp");
    pc.scheme = LambdaScheme::ramp(get_number(j, path, "lambda_max", 0.0));
  } else {
    throw ConfigError("population.scheme", "must be constant, uniform or ramp");
  }
  check("population", [&] { pc.scheme.validate(); });
  return pc;
}

inline HistogramConfig parse_histogram(const json& j) {
  const std::string path = "histogram";
  reject_unknown(j, path, {"bins", "binning"});
  HistogramConfig h;
  h.bins = get_count(j, path, "bins", h.bins);
  if (h.bins < 1) throw ConfigError("histogram.bins", "must be at least 1");
  const auto binning = analytics::parse_binning(get_string(j, path, "binning", "linear"));
  if (!binning) throw ConfigError("histogram.binning", "must be linear or log");
  h.binning = *binning;
  return h;
}

inline FitConfig parse_fit(const json& j) {
  const std::string path = "fit";
  reject_unknown(j, path, {"method", "xmin_quantile", "xmin", "xmax"});
  FitConfig f;
  const auto method = analytics::parse_tail_method(get_string(j, path, "method", "hill"));
  if (!method) throw ConfigError("fit.method", "must be hill or loglog_regression");
  f.method = *method;
  f.rule.quantile = get_number(j, path, "xmin_quantile", 0.9);
  if (!(f.rule.quantile >= 0.0 && f.rule.quantile < 1.0)) {
    throw ConfigError("fit.xmin_quantile", "must lie in [0, 1)");
  }
  if (j.contains("xmin")) {
    f.rule.value = get_number(j, path, "xmin", 0.0);
    if (!(*f.rule.value > 0.0)) throw ConfigError("fit.xmin", "must be positive");
  }
  if (j.contains("xmax")) {
    f.rule.xmax = get_number(j, path, "xmax", 0.0);
    if (f.rule.value && !(*f.rule.xmax > *f.rule.value)) {
      throw ConfigError("fit.xmax", "must exceed fit.xmin");
    }
  }
  return f;
}

inline std::vector<double> parse_grid(const json& j) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError("sweep.grid", "entries must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    reject_unknown(j, "sweep.grid", {"from", "to", "step"});
    for (auto key : {"from", "to", "step"}) {
      if (!j.contains(key)) throw ConfigError(std::string("sweep.grid.") + key, "is required");
    }
    const double from = get_number(j, "sweep.grid", "from", 0.0);
    const double to = get_number(j, "sweep.grid", "to", 0.0);
    const double step = get_number(j, "sweep.grid", "step", 0.0);
    if (!(step > 0.0)) throw ConfigError("sweep.grid.step", "must be positive");
    if (!(to >= from)) throw ConfigError("sweep.grid.to", "must not be below from");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Rounded to 12 decimals so 0.6 + 3 * 0.01 prints as 0.63.
      grid.push_back(std::round((from + step * static_cast<double>(i)) * 1e12) / 1e12);
    }
  } else {
    throw ConfigError("sweep.grid", "must be an array or {from, to, step}");
  }
  check("sweep.grid", [&] { analytics::require_lambda_grid(grid); });
  return grid;
}

inline SweepConfig parse_sweep(const json& j) {
  const std::string path = "sweep";
  reject_unknown(j, path, {"grid", "lyapunov_draws", "threshold", "refine", "precision"});
  SweepConfig s;
  if (j.contains("grid")) s.grid = parse_grid(j.at("grid"));
  s.lyapunov_draws = get_count(j, path, "lyapunov_draws", s.lyapunov_draws);
  if (s.lyapunov_draws < 1) throw ConfigError("sweep.lyapunov_draws", "must be at least 1");
  s.threshold = get_number(j, path, "threshold", s.threshold);
  if (!(s.threshold > 0.0)) throw ConfigError("sweep.threshold", "must be positive");
  s.refine = get_bool(j, path, "refine", s.refine);
  s.precision = get_number(j, path, "precision", s.precision);
  if (!(s.precision > 0.0)) throw ConfigError("sweep.precision", "must be positive");
  return s;
}

inline OutputConfig parse_output(const json& j) {
  const std::string path = "output";
  reject_unknown(j, path, {"histogram", "summary", "sweep", "sweep_summary", "fit", "samples"});
  OutputConfig o;
  o.histogram = get_string(j, path, "histogram", o.histogram);
  o.summary = get_string(j, path, "summary", o.summary);
  o.sweep = get_string(j, path, "sweep", o.sweep);
  o.sweep_summary = get_string(j, path, "sweep_summary", o.sweep_summary);
  o.fit = get_string(j, path, "fit", o.fit);
  if (j.contains("samples")) o.samples = get_string(j, path, "samples", "");
  for (const auto* name : {&o.histogram, &o.summary, &o.sweep, &o.sweep_summary, &o.fit}) {
    if (name->empty()) throw ConfigError("output", "file names must not be empty");
  }
  return o;
}

}  // namespace detail

// Validates a parsed document. `regime` is required unless only a fit is run.
inline RunConfig parse_config(const json& doc, bool require_regime = true) {
  detail::reject_unknown(doc, "",
                         {"regime", "plan", "population", "histogram", "fit", "sweep", "output"});
  RunConfig cfg;
  if (doc.contains("regime")) {
    cfg.regime = detail::parse_regime(doc.at("regime"));
  } else if (require_regime) {
    throw ConfigError("regime", "is required");
  }
  if (doc.contains("plan")) cfg.plan = detail::parse_plan(doc.at("plan"));
  if (doc.contains("population")) cfg.population = detail::parse_population(doc.at("population"));
  if (doc.contains("histogram")) cfg.histogram = detail::parse_histogram(doc.at("histogram"));
  if (doc.contains("fit")) cfg.fit = detail::parse_fit(doc.at("fit"));
  if (doc.contains("sweep")) cfg.sweep = detail::parse_sweep(doc.at("sweep"));
  if (doc.contains("output")) cfg.output = detail::parse_output(doc.at("output"));
  return cfg;
}

// Accepts JSON with // and /* */ comments.
inline json parse_config_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<config>", std::string("malformed config: ") + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

inline RunConfig load_config(const std::filesystem::path& path, bool require_regime = true) {
  return parse_config(parse_config_text(read_text_file(path)), require_regime);
}

}  // namespace stochmap::cli
