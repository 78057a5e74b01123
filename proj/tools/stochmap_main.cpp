#include <charconv>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

using stochmap::cli::CommonOptions;
namespace exit_code = stochmap::cli::exit_code;

void add_common(CLI::App& cmd, CommonOptions& opts, std::string& out_dir, std::string& config,
                bool config_required) {
  auto* c = cmd.add_option("--config", config, "Run configuration (JSON, comments allowed)");
  if (config_required) c->required();
  cmd.add_option("--seed", opts.seed, "Override plan.seed (unsigned 64-bit)");
  cmd.add_option("--out", out_dir, "Output directory")->capture_default_str();
  cmd.add_option("--threads", opts.threads, "Worker threads, 0 = one per core")
      ->capture_default_str();
}

std::vector<double> parse_params(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const auto& s : raw) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw stochmap::cli::ConfigError("oracle", "parameter '" + s + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo engine for the capped stochastic map\n"
      "  m(t) = min{(l1 + eps*l2) m(t-1) + xi*l3^n, theta}\n\n"
      "Config defaults: plan {seed 1, burn_in 10000, samples 100000, stride 1, replicas 1},\n"
      "histogram {bins 50, binning linear}, fit {method hill, xmin_quantile 0.9},\n"
      "sweep {lyapunov_draws 1000000, threshold 0.001, refine true, precision 0.0001}.\n"
      "Exit codes: 0 success, 2 invalid configuration, 3 I/O error."};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string out_dir = ".";
  std::string config;

  auto* simulate = app.add_subcommand("simulate", "Run a regime, write hist.csv and summary.json");
  add_common(*simulate, opts, out_dir, config, true);

  auto* sweep = app.add_subcommand("sweep", "Sweep lambda, write sweep.csv and sweep.json");
  add_common(*sweep, opts, out_dir, config, true);

  std::string samples_file;
  auto* fit = app.add_subcommand("fit", "Fit a power-law tail to a file of samples");
  fit->add_option("samples", samples_file, "One sample per line")->required();
  add_common(*fit, opts, out_dir, config, false);

  std::string oracle_name;
  std::vector<std::string> oracle_params;
  auto* oracle = app.add_subcommand("oracle", "Print a closed-form reference value");
  oracle->add_option("name", oracle_name, "critical_lambda, stationary_mean, variance_independent, "
                                          "variance_coupled, mean_power, tail_exponent")
      ->required();
  oracle->add_option("params", oracle_params, "Numeric parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::invalid;
  }

  if (!config.empty()) opts.config = config;
  opts.out = out_dir;

  try {
    if (simulate->parsed()) return stochmap::cli::cmd_simulate(opts, std::cout);
    if (sweep->parsed()) return stochmap::cli::cmd_sweep(opts, std::cout);
    if (fit->parsed()) return stochmap::cli::cmd_fit(samples_file, opts, std::cout);
    if (oracle->parsed()) {
      return stochmap::cli::cmd_oracle(oracle_name, parse_params(oracle_params), std::cout);
    }
  } catch (const stochmap::cli::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::invalid;
  }
  return exit_code::invalid;
}
