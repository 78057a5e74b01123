// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochmap/stochmap.hpp"

namespace fs = std::filesystem;
using namespace stochmap;
using namespace stochmap::analytics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct Context {
  std::string cli;
  fs::path configs;
  fs::path work;
  unsigned threads = 0;
};

std::vector<double> single_run(const Regime& regime, const SimulationPlan& plan) {
  return evolve(AgentState{}, make_coefficients(regime), plan, make_noise(regime));
}

// Pooled samples of a heterogeneous population.
std::vector<double> population_run(const Regime& base, std::size_t size, const LambdaScheme& scheme,
                                   const SimulationPlan& plan, unsigned threads) {
  const auto agents = build_population(size, scheme, plan.seed);
  const auto coeffs = population_coefficients(base, agents);
  return pool(evolve_population(agents, coeffs, plan, {}, SampleSpace::linear, threads));
}

Outcome stationary_mean(const Context&) {
  Outcome o{true, {}};
  for (double l : {0.0, 0.4, 0.7}) {
    const double m = mean(single_run(Regime::skewed_independent(l), {1, 10'000, 1'000'000, 1, 1}));
    o.pass = o.pass && std::abs(m - 1.0) < 0.01;
    o.detail += fmt("lambda=%g mean=%.5f; ", l, m);
  }
  return o;
}

Outcome variance_independent(const Context&) {
  Outcome o{true, {}};
  for (double l : {0.0, 0.2, 0.4, 0.7, 0.9}) {
    const auto xs = single_run(Regime::skewed_independent(l), {2, 10'000, 1'000'000, 10, 1});
    const double v = moments(xs).variance;
    const double ref = (1.0 - l) / (2.0 * (2.0 + l));
    const double rel = std::abs(v / ref - 1.0);
    o.pass = o.pass && rel < 0.02;
    o.detail += fmt("lambda=%g var=%.5f ref=%.5f rel=%.4f; ", l, v, ref, rel);
  }
  return o;
}

Outcome variance_coupled(const Context&) {
  const double v =
      moments(single_run(Regime::skewed_coupled(0.0), {3, 10'000, 1'000'000, 10, 1})).variance;
  return {std::abs(v / 0.5 - 1.0) < 0.02, fmt("var=%.5f ref=0.5", v)};
}

Outcome flat_density_below_one(const Context&) {
  const auto xs = single_run(Regime::skewed_coupled(0.0), {4, 10'000, 1'000'000, 1, 1});
  const Histogram h = histogram(xs, 16, Binning::linear, 0.1, 0.9);
  const double avg = mean(h.density);
  double worst = 0.0;
  for (double d : h.density) worst = std::max(worst, std::abs(d / avg - 1.0));
  return {worst < 0.05, fmt("max relative deviation %.4f over 16 bins", worst)};
}

Outcome power_law_mean(const Context&) {
  Outcome o{true, {}};
  for (auto [n, l] : {std::pair{0.0, 0.5}, std::pair{-20.0, 0.25}}) {
    const auto xs = single_run(Regime::power_law(l, n), {5, 10'000, 1'000'000, 1, 1});
    const double m = mean(xs);
    const double se = batch_means_standard_error(xs);
    const double ref = std::pow(1.0 - l, n - 1.0);
    const double z = std::abs(m - ref) / se;
    o.pass = o.pass && z < 3.0;
    o.detail += fmt("n=%g lambda=%g mean=%.4f ref=%.4f z=%.2f; ", n, l, m, ref, z);
  }
  return o;
}

Outcome tail_exponents(const Context& ctx) {
  const SimulationPlan flat_plan{1, 100'000, 10, 100, 1};
  const auto flat =
      population_run(Regime::power_law(0.0, 0.0), 10'000, LambdaScheme::uniform(0.0, 1.0),
                     flat_plan, ctx.threads);
  const auto hill = fit_tail(flat, XminRule::at_quantile(0.9), TailMethod::hill);

  // The n = -20 tail is cut off near the largest agent mean, so the fit
  // window runs from ten times the smallest agent mean to a quarter of the
  // largest.
  const double lmax = 0.33;
  const SimulationPlan steep_plan{1, 10'000, 100, 100, 1};
  const auto steep =
      population_run(Regime::power_law(0.0, -20.0), 2000, LambdaScheme::uniform(0.0, lmax),
                     steep_plan, ctx.threads);
  const double lo = 10.0 * oracle::mean_power(0.0, -20.0);
  const double hi = oracle::mean_power(lmax, -20.0) / 4.0;
  const auto reg =
      fit_tail(steep, XminRule::at_value(lo).up_to(hi), TailMethod::loglog_regression);

  const bool pass = std::abs(hill.exponent - 2.0) <= 0.15 && std::abs(reg.exponent - 1.05) <= 0.10;
  return {pass, fmt("n=0 hill=%.4f (k=%zu); n=-20 regression=%.4f on [%.3g, %.3g]", hill.exponent,
                    hill.n_tail, reg.exponent, lo, hi)};
}

double locus_for(double n, std::initializer_list<double> lambdas) {
  std::vector<std::vector<double>> groups;
  for (double l : lambdas) groups.push_back(single_run(Regime::power_law(l, n), {7, 10'000, 1'000'000, 1, 1}));
  return locus_slope(conditional_density_locus(groups)).slope;
}

Outcome locus_slopes(const Context&) {
  const double steep = locus_for(-20.0, {0.0, 0.1, 0.2, 0.25, 0.3});
  const double flat = locus_for(0.0, {0.1, 0.5, 0.8, 0.9, 0.95, 0.98});
  const bool pass = std::abs(steep + 1.0) <= 0.15 && std::abs(flat + 0.5) <= 0.10;
  return {pass, fmt("n=-20 slope=%.4f; n=0 slope=%.4f", steep, flat)};
}

Outcome critical_point(const Context&) {
  const double lc = std::exp(-estimate_mean_log_one_plus_eps(10'000'000, 1));
  bool jensen = lc > 2.0 / 3.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    jensen = jensen && std::exp(-estimate_mean_log_one_plus_eps(10'000, seed)) > 2.0 / 3.0;
  }
  return {std::abs(lc - 0.6796) <= 0.003 && jensen,
          fmt("lambda_c=%.6f e/4=%.6f jensen=%s", lc, oracle::critical_lambda(),
              jensen ? "held" : "violated")};
}

Outcome variance_divergence(const Context& ctx) {
  const std::uint64_t cps[] = {100, 1000, 10000};
  VarianceGrowthOptions opts;
  opts.threads = ctx.threads;
  const SimulationPlan plan{9, 0, 1, 1, 1000};
  const auto at_c = variance_growth(oracle::critical_lambda(), cps, plan, opts);
  const auto below = variance_growth(0.5, cps, plan, opts);
  const auto& a = at_c.log_variance;
  const auto& b = below.log_variance;
  const bool pass = a[0] < a[1] && a[1] < a[2] && b[0] > b[1] && b[1] > b[2];
  return {pass, fmt("log var at lambda_c: %.3f %.3f %.3f; at 0.5: %.1f %.1f %.1f", a[0], a[1],
                    a[2], b[0], b[1], b[2])};
}

Outcome gibrat_clt(const Context& ctx) {
  const auto regime = Regime::gibrat(0.1);
  const std::uint64_t steps = 10'000;
  const auto finals = ensemble_final_states(AgentState{}, make_coefficients(regime),
                                            make_noise(regime), steps, 10, 10'000, ctx.threads);
  std::vector<double> logs;
  for (const auto& s : finals) logs.push_back(s.log_m);
  const auto st = normality_check(logs, static_cast<double>(steps), product_map_drift(1.0, 0.1));
  return {std::abs(st.skewness) < 0.05 && std::abs(st.excess_kurtosis) < 0.1,
          fmt("skewness=%.4f excess kurtosis=%.4f", st.skewness, st.excess_kurtosis)};
}

Outcome span_shrinkage(const Context& ctx) {
  const std::size_t agents = 1000;
  const SimulationPlan plan{11, 10'000, 2'000'000 / agents, 10, 1};
  std::vector<double> spans;
  std::string detail;
  for (double lm : {0.9, 0.95, 0.99}) {
    const auto xs =
        population_run(Regime::power_law(0.0, 0.0), agents, LambdaScheme::ramp(lm), plan, ctx.threads);
    spans.push_back(power_law_span_decades(xs, 2.0));
    detail += fmt("lambda_M=%g span=%.2f; ", lm, spans.back());
  }
  return {spans[0] < spans[1] && spans[1] < spans[2], detail};
}

// stdout is captured next to the output files; `oracle` writes nothing else.
int run_cli(const Context& ctx, const std::string& args, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const bool writes_files = args.rfind("oracle", 0) != 0;
  const std::string cmd = ctx.cli + " " + args +
                          (writes_files ? " --out " + out_dir.string() : std::string()) + " > " +
                          (out_dir / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    ++files;
    if (!fs::exists(b / name) || slurp(entry.path()) != slurp(b / name)) {
      diff += name.string() + " differs; ";
      return false;
    }
  }
  diff += fmt("%zu files; ", files);
  return files > 0;
}

Outcome determinism(const Context& ctx) {
  const fs::path root = ctx.work / "determinism";
  fs::remove_all(root);
  const auto cfg = [&](const char* name) { return (ctx.configs / name).string(); };
  struct Cmd {
    std::string name, args;
  };
  const std::vector<Cmd> cmds = {
      {"simulate", "simulate --config " + cfg("fig1.cfg")},
      {"population", "simulate --config " + cfg("fig3.cfg")},
      {"sweep", "sweep --config " + cfg("fig6.cfg")},
      {"oracle", "oracle mean_power 0.25 -20"},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cmds) {
    for (const char* run : {"a", "b"}) {
      const int code = run_cli(ctx, c.args, root / c.name / run);
      if (code != 0) {
        pass = false;
        detail += c.name + fmt(" exit %d; ", code);
      }
    }
    detail += c.name + ": ";
    pass = same_tree(root / c.name / "a", root / c.name / "b", detail) && pass;
  }
  const fs::path samples = root / "population" / "a" / "samples.txt";
  for (const char* run : {"a", "b"}) {
    pass = run_cli(ctx, "fit " + samples.string() + " --config " + cfg("fig3.cfg"),
                   root / "fit" / run) == 0 && pass;
  }
  detail += "fit: ";
  pass = same_tree(root / "fit" / "a", root / "fit" / "b", detail) && pass;
  fs::remove_all(root);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Context ctx;
  std::string configs;
  app.add_option("--cli", ctx.cli, "Path to the stochmap executable")->required();
  app.add_option("--configs", configs, "Directory holding the shipped configs")->required();
  app.add_option("--threads", ctx.threads, "Worker threads, 0 = one per core");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  ctx.work = fs::temp_directory_path() / "stochmap_acceptance";

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
      {"stationary mean", stationary_mean},
      {"variance, independent noise", variance_independent},
      {"variance, coupled noise", variance_coupled},
      {"flat density below 1", flat_density_below_one},
      {"power-law agent means", power_law_mean},
      {"tail exponents", tail_exponents},
      {"conditional density locus", locus_slopes},
      {"critical point", critical_point},
      {"variance divergence", variance_divergence},
      {"log-normal growth", gibrat_clt},
      {"power-law span ordering", span_shrinkage},
      {"cli determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s(%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
