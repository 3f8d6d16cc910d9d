// d2dcast command-line tool.
//
// Subcommands: simulate, analytic, optimize, outage, sweep, validate.
// Exit codes: 0 success, 1 usage error, 2 configuration/validation error,
// 3 runtime error. Diagnostics go to stderr; results to stdout or --out.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "d2dcast/analytic.hpp"
#include "d2dcast/experiments.hpp"
#include "d2dcast/mc_engine.hpp"
#include "d2dcast/rng.hpp"
#include "d2dcast/solvers.hpp"
#include "d2dcast/topology.hpp"

namespace {

using nlohmann::json;
using namespace d2dcast;

// Matches the realization-0 topology substream used by run_scenario.
constexpr std::uint64_t kTopologyDomain = 0x10000;

struct CommonOpts {
  std::string config_path;
  std::string scenario = "a";
  std::string out = "-";
  std::string format = "csv";
  std::string estimator = "collapsed";
  std::vector<int> K;
  std::vector<double> s;
  double eps = -1.0;
  double beta = -1.0;
  std::int64_t trials = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
  bool timing = false;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_output = false) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--scenario", o.scenario, "built-in preset: a, b or c")
      ->check(CLI::IsMember({"a", "b", "c"}));
  sub->add_option("--seed", o.seed, "master RNG seed")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  sub->add_option("--trials", o.trials, "Monte Carlo trials per estimate");
  sub->add_option("--eps", o.eps, "outage tolerance in (0,1)");
  sub->add_option("--K", o.K, "number of users (sweep accepts several)");
  sub->add_option("--s", o.s, "SNR threshold(s)");
  sub->add_option("--threads", o.threads, "worker threads (0 = auto; never affects results)");
  if (with_output) {
    sub->add_option("--out", o.out, "output path ('-' = stdout)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--timing", o.timing, "record wall-clock runtimes (breaks byte-level "
                                        "reproducibility of output files)");
  }
}

ExperimentConfig make_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  else cfg.scenario = scenario_from_string(o.scenario);
  if (o.seed_set) cfg.seed = o.seed;
  if (o.trials > 0) cfg.trials = o.trials;
  if (o.eps > 0.0) cfg.eps = o.eps;
  if (!o.K.empty()) cfg.K_list = o.K;
  if (!o.s.empty()) cfg.s_list = o.s;
  if (o.threads >= 0) cfg.threads = o.threads;
  cfg.record_runtime = o.timing;
  cfg.validate();
  return cfg;
}

GainMatrix make_gain_matrix(const ExperimentConfig& cfg, int K) {
  if (cfg.scenario == Scenario::c)
    return geometric_gain_matrix(cfg.radius_m, K, cfg.pathloss,
                                 rng::derive(cfg.seed, kTopologyDomain));
  return block_gain_matrix(cfg.resolved_model(), K);
}

void emit(const json& j, const std::string& out) {
  if (out == "-" || out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + out + "' for writing");
  file << j.dump(2) << '\n';
}

json to_json(const SchemeEval& e) {
  return {{"s", e.s},
          {"rate", e.rate},
          {"probability", e.probability},
          {"stderr", e.std_error},
          {"source", e.source}};
}

SimEstimate run_estimator(const std::string& name, const GainMatrix& gm, double s,
                          std::int64_t trials, std::uint64_t seed, int threads) {
  if (name == "full") return simulate_full(gm, s, trials, seed, threads);
  if (name == "collapsed") return simulate_collapsed(gm, s, trials, seed, threads);
  if (name == "baseline") return simulate_baseline(gm, s, trials, seed, threads);
  throw ConfigError("unknown estimator '" + name + "'");
}

int cmd_simulate(const CommonOpts& o) {
  ExperimentConfig cfg = make_config(o);
  if (o.s.size() != 1) throw ConfigError("simulate requires exactly one --s value");
  const int K = cfg.K_list.front();
  const GainMatrix gm = make_gain_matrix(cfg, K);
  const SimEstimate est = run_estimator(o.estimator, gm, o.s.front(), cfg.trials, cfg.seed,
                                        cfg.threads);
  json j{{"estimator", est.estimator}, {"K", K},
         {"s", est.s},                 {"mean_success", est.mean_success},
         {"all_success", est.all_success}, {"stderr_mean", est.stderr_mean},
         {"stderr_all", est.stderr_all},   {"trials", est.trials},
         {"seed", cfg.seed}};
  emit(j, o.out);
  return 0;
}

int cmd_analytic(const CommonOpts& o, const std::string& what) {
  ExperimentConfig cfg = make_config(o);
  const ClassModel& model = cfg.resolved_model();
  char buf[64];
  const auto print_scalar = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (o.out == "-" || o.out.empty()) {
      std::cout << buf << '\n';
    } else {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open '" + o.out + "' for writing");
      file << buf << '\n';
    }
  };

  if (what == "beta_star") {
    print_scalar(beta_thresholds(model).beta_star);
  } else if (what == "beta_c") {
    emit(json(beta_thresholds(model).beta_c), o.out);
  } else if (what == "baseline_rate") {
    emit(to_json(baseline_multicast_rate(model)), o.out);
  } else if (what == "baseline_outage") {
    emit(to_json(baseline_outage_rate(model, cfg.K_list.front(), cfg.eps)), o.out);
  } else if (what == "approx_pbar") {
    if (o.s.size() != 1) throw ConfigError("approx_pbar requires exactly one --s value");
    print_scalar(approx_mean_success(model, o.s.front(), cfg.K_list.front()));
  } else if (what == "phase_limit") {
    if (!(o.beta > 0.0)) throw ConfigError("phase_limit requires --beta > 0");
    print_scalar(phase_limit_mean_success(model, o.beta));
  } else if (what == "asymptotic_outage") {
    if (o.s.size() != 1) throw ConfigError("asymptotic_outage requires exactly one --s value");
    print_scalar(asymptotic_outage_prob(model, o.s.front()));
  } else if (what == "taylor_snr") {
    print_scalar(outage_snr_taylor(model, cfg.eps));
  } else {
    throw ConfigError("unknown --what '" + what + "'");
  }
  return 0;
}

int cmd_optimize(const CommonOpts& o) {
  ExperimentConfig cfg = make_config(o);
  const int K = cfg.K_list.front();
  SchemeEval eval;
  if (o.estimator == "baseline") {
    if (cfg.scenario == Scenario::c) {
      const GainMatrix gm = make_gain_matrix(cfg, K);
      eval = maximize_effective_rate(
          [&gm](double s) {
            double p = 0.0;
            for (int i = 1; i <= gm.num_users(); ++i) p += decode_prob(s, gm.gamma(0, i));
            return p / gm.num_users();
          },
          1.0, default_s_max(gm), 256, 1e-9);
    } else {
      eval = baseline_multicast_rate(cfg.resolved_model());
    }
  } else if (o.estimator == "full" || o.estimator == "collapsed") {
    const GainMatrix gm = make_gain_matrix(cfg, K);
    eval = maximize_effective_rate(
        [&](double s) {
          return run_estimator(o.estimator, gm, s, cfg.trials, cfg.seed, cfg.threads)
              .mean_success;
        },
        0.5, default_s_max(gm), cfg.grid_points, 1e-3);
    eval.source = "mc";
  } else if (o.estimator == "approx") {
    const ClassModel& model = cfg.resolved_model();
    eval = maximize_effective_rate(
        [&](double s) { return approx_mean_success(model, s, K); }, 0.5, default_s_max(model),
        256, 1e-9);
    eval.source = "approx";
  } else if (o.estimator == "asymptotic") {
    const ClassModel& model = cfg.resolved_model();
    const double ln_K = std::log(static_cast<double>(K));
    eval = maximize_effective_rate(
        [&](double s) { return phase_limit_mean_success(model, s / ln_K); }, 0.5,
        default_s_max(model), 1024, 1e-12);
    eval.source = "approx";
  } else {
    throw ConfigError("unknown estimator '" + o.estimator + "'");
  }
  emit(to_json(eval), o.out);
  return 0;
}

int cmd_outage(const CommonOpts& o) {
  ExperimentConfig cfg = make_config(o);
  const int K = cfg.K_list.front();
  SchemeEval eval;
  if (o.estimator == "baseline") {
    if (cfg.scenario == Scenario::c)
      throw ConfigError("baseline outage for scenario c: use sweep (realization averaging)");
    eval = baseline_outage_rate(cfg.resolved_model(), K, cfg.eps);
  } else if (o.estimator == "full" || o.estimator == "collapsed") {
    const GainMatrix gm = make_gain_matrix(cfg, K);
    eval = solve_outage_snr_mc(gm, cfg.eps, cfg.trials, cfg.seed, 1e-3, cfg.threads,
                               o.estimator == "full");
  } else if (o.estimator == "asymptotic") {
    if (cfg.scenario == Scenario::c) {
      const GainMatrix gm = make_gain_matrix(cfg, K);
      eval = solve_outage_snr_asymptotic(gm, cfg.eps);
    } else {
      eval = solve_outage_snr_asymptotic(cfg.resolved_model(), cfg.eps);
    }
  } else {
    throw ConfigError("unknown estimator '" + o.estimator + "' for outage");
  }
  emit(to_json(eval), o.out);
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<std::string>& metrics,
              const std::vector<std::string>& estimators) {
  ExperimentConfig cfg = make_config(o);
  if (!metrics.empty()) cfg.metrics = metrics;
  if (!estimators.empty()) cfg.estimators = estimators;
  cfg.validate();
  const std::vector<ResultRow> rows = run_scenario(cfg);
  write_results(rows, o.out, o.format);
  if (o.out != "-")
    std::cerr << "wrote " << rows.size() << " rows to " << o.out << " (" << o.format << ")\n";
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  ExperimentConfig cfg = make_config(o);  // runs config validation
  if (cfg.scenario == Scenario::c) {
    std::cout << "configuration valid; geometric scenario (no class model to check)\n";
    return 0;
  }
  const ClassModel& model = cfg.resolved_model();
  const std::vector<int> bad = validate_two_hop(model);
  if (!bad.empty()) {
    std::cerr << "Assumption 1 violated: class(es)";
    for (int c : bad) std::cerr << ' ' << c;
    std::cerr << " are not two-hop reachable (no c' with g(0,c')*g(c',c) > 0)\n";
    return 2;
  }
  std::cout << "configuration valid; Assumption 1 satisfied (every class two-hop reachable)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-slot device-to-device aided multicast: simulation, analysis, optimization"};
  app.require_subcommand(1);

  CommonOpts sim_o, ana_o, opt_o, out_o, swp_o, val_o;
  std::string what;
  std::vector<std::string> metrics, estimators;

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimate at one SNR threshold");
  add_common(sim, sim_o, true);
  sim->add_option("--estimator", sim_o.estimator, "full, collapsed or baseline")
      ->check(CLI::IsMember({"full", "collapsed", "baseline"}));

  CLI::App* ana = app.add_subcommand("analytic", "closed-form and asymptotic quantities");
  add_common(ana, ana_o, true);
  ana->add_option("--what", what,
                  "beta_star, beta_c, baseline_rate, baseline_outage, approx_pbar, "
                  "phase_limit, asymptotic_outage or taylor_snr")
      ->required();
  ana->add_option("--beta", ana_o.beta, "threshold coefficient for phase_limit");

  CLI::App* opt = app.add_subcommand("optimize", "maximize the multicast rate over s");
  add_common(opt, opt_o, true);
  opt->add_option("--estimator", opt_o.estimator,
                  "baseline, full, collapsed, approx or asymptotic")
      ->check(CLI::IsMember({"baseline", "full", "collapsed", "approx", "asymptotic"}));

  CLI::App* out = app.add_subcommand("outage", "solve for the eps-outage SNR and rate");
  add_common(out, out_o, true);
  out->add_option("--estimator", out_o.estimator, "baseline, full, collapsed or asymptotic")
      ->check(CLI::IsMember({"baseline", "full", "collapsed", "asymptotic"}));

  CLI::App* swp = app.add_subcommand("sweep", "full experiment grid to CSV/JSON");
  add_common(swp, swp_o, true);
  swp->add_option("--metrics", metrics,
                  "multicast_rate, outage_rate, rate_vs_s, outage_vs_s");
  swp->add_option("--estimators", estimators,
                  "baseline, full, collapsed, approx, asymptotic");

  CLI::App* val = app.add_subcommand("validate", "check the configuration and Assumption 1");
  add_common(val, val_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_o);
    if (ana->parsed()) return cmd_analytic(ana_o, what);
    if (opt->parsed()) return cmd_optimize(opt_o);
    if (out->parsed()) return cmd_outage(out_o);
    if (swp->parsed()) return cmd_sweep(swp_o, metrics, estimators);
    if (val->parsed()) return cmd_validate(val_o);
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  }
  return 1;
}
