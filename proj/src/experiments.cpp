#include "d2dcast/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "d2dcast/mc_engine.hpp"
#include "d2dcast/rng.hpp"

namespace d2dcast {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTopologyDomain = 0x10000;
constexpr std::uint64_t kTrialsDomain = 0x20000;

const std::vector<std::string> kKnownMetrics = {"multicast_rate", "outage_rate", "rate_vs_s",
                                                "outage_vs_s"};
const std::vector<std::string> kKnownEstimators = {"baseline", "full", "collapsed", "approx",
                                                   "asymptotic"};

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// One evaluation point of a cell: rows are built from these after the
// scenario-(c) aggregation over realizations.
struct Point {
  double s = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

double baseline_mean_success_dense(const GainMatrix& gm, double s) {
  double p = 0.0;
  for (int i = 1; i <= gm.num_users(); ++i) p += decode_prob(s, gm.gamma(0, i));
  return p / gm.num_users();
}

double baseline_all_success_dense(const GainMatrix& gm, double s) {
  if (s == 0.0) return 1.0;
  double inv_sum = 0.0;
  for (int i = 1; i <= gm.num_users(); ++i) {
    const double g = gm.gamma(0, i);
    if (g <= 0.0) return 0.0;
    inv_sum += 1.0 / g;
  }
  return std::exp(-s * inv_sum);
}

double baseline_all_success_block(const ClassModel& model, double s, int K) {
  if (s == 0.0) return 1.0;
  double inv_sum = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c) {
    const double g = model.g(0, static_cast<std::size_t>(c));
    if (g <= 0.0) return 0.0;
    inv_sum += model.alpha[static_cast<std::size_t>(c) - 1] / g;
  }
  return std::exp(-s * K * inv_sum);
}

SchemeEval baseline_outage_rate_dense(const GainMatrix& gm, double eps) {
  double inv_sum = 0.0;
  for (int i = 1; i <= gm.num_users(); ++i) {
    const double g = gm.gamma(0, i);
    if (g <= 0.0) return {0.0, 0.0, 1.0, 0.0, "analytic"};
    inv_sum += 1.0 / g;
  }
  const double s = std::log1p(eps / (1.0 - eps)) / inv_sum;
  return {s, std::log2(1.0 + s), 1.0 - eps, 0.0, "analytic"};
}

SimEstimate run_mc(const std::string& estimator, const GainMatrix& gm, double s,
                   const ExperimentConfig& cfg, std::uint64_t seed) {
  if (estimator == "full") return simulate_full(gm, s, cfg.trials, seed, cfg.threads);
  return simulate_collapsed(gm, s, cfg.trials, seed, cfg.threads);
}

// Evaluates one (metric, estimator, K) cell on one topology. `model` is null
// for the geometric scenario; `gm` is built only when a sampler needs it.
std::vector<Point> eval_cell(const ExperimentConfig& cfg, const std::string& metric,
                             const std::string& estimator, int K, const ClassModel* model,
                             const GainMatrix* gm, std::uint64_t mc_seed) {
  const bool is_mc = estimator == "full" || estimator == "collapsed";
  const double ln_K = std::log(static_cast<double>(K));

  if (metric == "multicast_rate") {
    if (estimator == "baseline") {
      if (model) {
        const SchemeEval e = baseline_multicast_rate(*model);
        return {{e.s, e.rate * e.probability, 0.0}};
      }
      const SchemeEval e = maximize_effective_rate(
          [gm](double s) { return baseline_mean_success_dense(*gm, s); }, 1.0,
          default_s_max(*gm), 256, 1e-9);
      return {{e.s, e.rate * e.probability, 0.0}};
    }
    if (is_mc) {
      const SchemeEval e = maximize_effective_rate(
          [&](double s) { return run_mc(estimator, *gm, s, cfg, mc_seed).mean_success; }, 0.5,
          model ? default_s_max(*model) : default_s_max(*gm), cfg.grid_points, 1e-3);
      const SimEstimate at_best = run_mc(estimator, *gm, e.s, cfg, mc_seed);
      return {{e.s, e.rate * at_best.mean_success,
               0.5 * std::log2(1.0 + e.s) * at_best.stderr_mean}};
    }
    if (estimator == "approx") {
      const SchemeEval e = maximize_effective_rate(
          [&](double s) { return approx_mean_success(*model, s, K); }, 0.5,
          default_s_max(*model), 256, 1e-9);
      return {{e.s, e.rate * e.probability, 0.0}};
    }
    // asymptotic: the phase-transition step limit of P-bar at s = beta ln K
    const SchemeEval e = maximize_effective_rate(
        [&](double s) { return phase_limit_mean_success(*model, s / ln_K); }, 0.5,
        default_s_max(*model), 1024, 1e-12);
    return {{e.s, e.rate * e.probability, 0.0}};
  }

  if (metric == "outage_rate") {
    if (estimator == "baseline") {
      const SchemeEval e =
          model ? baseline_outage_rate(*model, K, cfg.eps) : baseline_outage_rate_dense(*gm, cfg.eps);
      return {{e.s, e.rate, 0.0}};
    }
    if (is_mc) {
      const SchemeEval e = solve_outage_snr_mc(*gm, cfg.eps, cfg.trials, mc_seed, 1e-3,
                                               cfg.threads, estimator == "full");
      return {{e.s, e.rate, e.std_error}};
    }
    // asymptotic / approx: both map to the large-K outage limit
    const SchemeEval e = model ? solve_outage_snr_asymptotic(*model, cfg.eps)
                               : solve_outage_snr_asymptotic(*gm, cfg.eps);
    return {{e.s, e.rate, 0.0}};
  }

  std::vector<Point> points;
  points.reserve(cfg.s_list.size());
  if (metric == "rate_vs_s") {
    for (double s : cfg.s_list) {
      if (estimator == "baseline") {
        const double p = model ? baseline_mean_success(*model, s)
                               : baseline_mean_success_dense(*gm, s);
        points.push_back({s, std::log2(1.0 + s) * p, 0.0});
      } else if (is_mc) {
        const SimEstimate est = run_mc(estimator, *gm, s, cfg, mc_seed);
        const double half_rate = 0.5 * std::log2(1.0 + s);
        points.push_back({s, half_rate * est.mean_success, half_rate * est.stderr_mean});
      } else if (estimator == "approx") {
        points.push_back({s, 0.5 * std::log2(1.0 + s) * approx_mean_success(*model, s, K), 0.0});
      } else {
        const double p = s == 0.0 ? 1.0 : phase_limit_mean_success(*model, s / ln_K);
        points.push_back({s, 0.5 * std::log2(1.0 + s) * p, 0.0});
      }
    }
    return points;
  }

  // outage_vs_s: probability of error 1 - P_+(s)
  for (double s : cfg.s_list) {
    if (estimator == "baseline") {
      const double p = model ? baseline_all_success_block(*model, s, K)
                             : baseline_all_success_dense(*gm, s);
      points.push_back({s, 1.0 - p, 0.0});
    } else if (is_mc) {
      const SimEstimate est = run_mc(estimator, *gm, s, cfg, mc_seed);
      points.push_back({s, 1.0 - est.all_success, est.stderr_all});
    } else {
      const double p =
          model ? asymptotic_outage_prob(*model, s) : asymptotic_outage_prob(*gm, s);
      points.push_back({s, 1.0 - p, 0.0});
    }
  }
  return points;
}

// The analytic class-model estimators have no meaning for the geometric
// scenario, except the outage limit which has a per-realization general form.
bool supported_for_geometric(const std::string& metric, const std::string& estimator) {
  if (estimator == "approx") return false;
  if (estimator == "asymptotic")
    return metric == "outage_rate" || metric == "outage_vs_s";
  return true;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::a: return "a";
    case Scenario::b: return "b";
    case Scenario::c: return "c";
    default: return "custom";
  }
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "a") return Scenario::a;
  if (name == "b") return Scenario::b;
  if (name == "c") return Scenario::c;
  if (name == "custom") return Scenario::custom;
  throw ConfigError("unknown scenario '" + name + "' (expected a, b, c or custom)");
}

ClassModel scenario_a_model() {
  Matrix g(2, 2, 0.0);
  g(0, 1) = db_to_linear(46.0);
  g(1, 1) = db_to_linear(23.0);
  return ClassModel::make({1.0}, g);
}

ClassModel scenario_b_model() {
  Matrix g(3, 3, 0.0);
  g(0, 1) = db_to_linear(46.0);
  g(0, 2) = 0.0;  // far class: no direct station link
  g(1, 1) = db_to_linear(23.0);
  g(2, 2) = db_to_linear(23.0);
  g(1, 2) = db_to_linear(13.0);
  g(2, 1) = db_to_linear(13.0);
  return ClassModel::make({0.5, 0.5}, g);
}

PathlossParams scenario_c_pathloss() { return PathlossParams{}; }

const ClassModel& ExperimentConfig::resolved_model() const {
  static const ClassModel model_a = scenario_a_model();
  static const ClassModel model_b = scenario_b_model();
  switch (scenario) {
    case Scenario::a: return model_a;
    case Scenario::b: return model_b;
    case Scenario::custom:
      if (!model) throw ConfigError("custom scenario requires a class model");
      return *model;
    default: throw ConfigError("scenario c has no class model");
  }
}

void ExperimentConfig::validate() const {
  if (K_list.empty()) throw ConfigError("K_list must be nonempty");
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    if (K_list[i] < 1) throw ConfigError("K_list entries must be >= 1");
    if (i > 0 && K_list[i] <= K_list[i - 1])
      throw ConfigError("K_list must be strictly increasing");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must be in (0,1)");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (metrics.empty()) throw ConfigError("metrics must be nonempty");
  if (estimators.empty()) throw ConfigError("estimators must be nonempty");
  for (const auto& m : metrics)
    if (!contains(kKnownMetrics, m)) throw ConfigError("unknown metric '" + m + "'");
  for (const auto& e : estimators)
    if (!contains(kKnownEstimators, e)) throw ConfigError("unknown estimator '" + e + "'");
  const bool needs_s = contains(metrics, "rate_vs_s") || contains(metrics, "outage_vs_s");
  if (needs_s && s_list.empty()) throw ConfigError("*_vs_s metrics require a nonempty s_list");
  for (double s : s_list)
    if (!(s >= 0.0)) throw ConfigError("s_list entries must be >= 0");
  if (scenario == Scenario::custom && !model)
    throw ConfigError("custom scenario requires a class model");
  if (scenario != Scenario::c && scenario != Scenario::custom)
    (void)resolved_model();
  if (scenario == Scenario::c && !(radius_m > 0.0)) throw ConfigError("radius_m must be > 0");
}

std::vector<ResultRow> run_scenario(const ExperimentConfig& config) {
  config.validate();
  std::vector<ResultRow> rows;
  const std::string scen = to_string(config.scenario);

  for (const auto& metric : config.metrics) {
    for (const auto& estimator : config.estimators) {
      if (config.scenario == Scenario::c && !supported_for_geometric(metric, estimator)) {
        std::cerr << "warning: estimator '" << estimator << "' is undefined for metric '"
                  << metric << "' in the geometric scenario; skipping\n";
        continue;
      }
      for (int K : config.K_list) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<Point> points;
        try {
          if (config.scenario != Scenario::c) {
            const ClassModel& model = config.resolved_model();
            GainMatrix gm = block_gain_matrix(model, K);
            points = eval_cell(config, metric, estimator, K, &model, &gm, config.seed);
          } else {
            // Mean over topology draws, between-realization standard error.
            std::vector<std::vector<Point>> reals;
            reals.reserve(static_cast<std::size_t>(config.realizations));
            for (int r = 0; r < config.realizations; ++r) {
              const std::uint64_t topo_seed =
                  rng::derive(config.seed, kTopologyDomain + static_cast<std::uint64_t>(r));
              const std::uint64_t mc_seed =
                  rng::derive(config.seed, kTrialsDomain + static_cast<std::uint64_t>(r));
              const GainMatrix gm =
                  geometric_gain_matrix(config.radius_m, K, config.pathloss, topo_seed);
              reals.push_back(eval_cell(config, metric, estimator, K, nullptr, &gm, mc_seed));
            }
            const std::size_t npts = reals.front().size();
            const double R = static_cast<double>(config.realizations);
            for (std::size_t k = 0; k < npts; ++k) {
              Point agg;
              double sum = 0.0, sumsq = 0.0, s_sum = 0.0;
              for (const auto& rp : reals) {
                sum += rp[k].value;
                sumsq += rp[k].value * rp[k].value;
                s_sum += rp[k].s;
              }
              agg.s = s_sum / R;
              agg.value = sum / R;
              agg.std_error =
                  config.realizations > 1
                      ? std::sqrt(std::max(sumsq - sum * sum / R, 0.0) / (R - 1.0) / R)
                      : 0.0;
              points.push_back(agg);
            }
          }
        } catch (ConfigError&) {
          throw;
        } catch (const std::exception& ex) {
          throw std::runtime_error("run_scenario failed at (metric=" + metric + ", estimator=" +
                                   estimator + ", K=" + std::to_string(K) + "): " + ex.what());
        }
        const auto stop = std::chrono::steady_clock::now();
        const double elapsed_ms =
            std::chrono::duration<double, std::milli>(stop - start).count() /
            static_cast<double>(points.size());
        for (const Point& p : points) {
          ResultRow row;
          row.scenario = scen;
          row.metric = metric;
          row.estimator = estimator;
          row.K = K;
          row.s = p.s;
          row.value = p.value;
          row.std_error = p.std_error;
          row.runtime_ms = config.record_runtime ? elapsed_ms : 0.0;
          row.seed = config.seed;
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scenario, a.metric, a.estimator, a.K, a.s) <
           std::tie(b.scenario, b.metric, b.estimator, b.K, b.s);
  });
  return rows;
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path,
                   const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("write_results: no rows");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("write_results: format must be csv or json");

  std::ostringstream out;
  if (format == "csv") {
    out << "scenario,metric,estimator,K,s,value,stderr,runtime_ms,seed\n";
    for (const auto& r : rows)
      out << r.scenario << ',' << r.metric << ',' << r.estimator << ',' << r.K << ','
          << fmt17(r.s) << ',' << fmt17(r.value) << ',' << fmt17(r.std_error) << ','
          << fmt17(r.runtime_ms) << ',' << r.seed << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"scenario", r.scenario},
                     {"metric", r.metric},
                     {"estimator", r.estimator},
                     {"K", r.K},
                     {"s", r.s},
                     {"value", r.value},
                     {"stderr", r.std_error},
                     {"runtime_ms", r.runtime_ms},
                     {"seed", r.seed}});
    out << arr.dump(2) << '\n';
  }

  if (path == "-") {
    std::cout << out.str();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("write_results: cannot open '" + path + "' for writing");
  file << out.str();
  if (!file) throw std::runtime_error("write_results: I/O error writing '" + path + "'");
}

std::vector<ResultRow> read_results(const std::string& path, const std::string& format) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("read_results: cannot open '" + path + "'");
  std::vector<ResultRow> rows;
  if (format == "csv") {
    std::string line;
    std::getline(file, line);  // header
    while (std::getline(file, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string field;
      ResultRow r;
      std::getline(ss, r.scenario, ',');
      std::getline(ss, r.metric, ',');
      std::getline(ss, r.estimator, ',');
      std::getline(ss, field, ',');
      r.K = std::stoi(field);
      std::getline(ss, field, ',');
      r.s = std::stod(field);
      std::getline(ss, field, ',');
      r.value = std::stod(field);
      std::getline(ss, field, ',');
      r.std_error = std::stod(field);
      std::getline(ss, field, ',');
      r.runtime_ms = std::stod(field);
      std::getline(ss, field, ',');
      r.seed = std::stoull(field);
      rows.push_back(std::move(r));
    }
    return rows;
  }
  json arr = json::parse(file);
  for (const auto& item : arr) {
    ResultRow r;
    r.scenario = item.at("scenario").get<std::string>();
    r.metric = item.at("metric").get<std::string>();
    r.estimator = item.at("estimator").get<std::string>();
    r.K = item.at("K").get<int>();
    r.s = item.at("s").get<double>();
    r.value = item.at("value").get<double>();
    r.std_error = item.at("stderr").get<double>();
    r.runtime_ms = item.at("runtime_ms").get<double>();
    r.seed = item.at("seed").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

double parse_gain(const json& j, const std::string& where) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!(v >= 0.0)) throw ConfigError(where + ": linear gains must be >= 0");
    return v;
  }
  if (j.is_object() && j.contains("dB") && j.size() == 1)
    return db_to_linear(j.at("dB").get<double>());
  if (j.is_object() && j.contains("value") && j.contains("unit") && j.size() == 2) {
    if (j.at("unit").get<std::string>() != "dB")
      throw ConfigError(where + ": unknown unit '" + j.at("unit").get<std::string>() + "'");
    return db_to_linear(j.at("value").get<double>());
  }
  throw ConfigError(where +
                    ": gains must be a number (linear), {\"dB\": x} or "
                    "{\"value\": x, \"unit\": \"dB\"}");
}

ClassModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("g"))
    throw ConfigError("model must be an object with 'alpha' and 'g'");
  std::vector<double> alpha = j.at("alpha").get<std::vector<double>>();
  const auto& gj = j.at("g");
  const std::size_t n = alpha.size() + 1;
  if (!gj.is_array() || gj.size() != n)
    throw ConfigError("model.g must be a (C+1)x(C+1) array (row/col 0 = station)");
  Matrix g(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!gj[i].is_array() || gj[i].size() != n)
      throw ConfigError("model.g must be a (C+1)x(C+1) array (row/col 0 = station)");
    for (std::size_t k = 0; k < n; ++k) g(i, k) = parse_gain(gj[i][k], "model.g");
  }
  try {
    return ClassModel::make(std::move(alpha), std::move(g));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::vector<std::string> known = {
      "scenario", "model",        "pathloss",   "radius_m", "K_list",     "s_list",
      "eps",      "trials",       "realizations", "seed",   "metrics",    "estimators",
      "threads",  "grid_points",  "record_runtime"};
  for (const auto& [key, _] : j.items())
    if (!contains(known, key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  if (j.contains("scenario")) cfg.scenario = scenario_from_string(j.at("scenario"));
  if (j.contains("model")) cfg.model = model_from_json(j.at("model"));
  if (j.contains("pathloss")) {
    const auto& p = j.at("pathloss");
    if (p.contains("station_power_dB")) cfg.pathloss.station_power_dB = p.at("station_power_dB");
    if (p.contains("user_power_dB")) cfg.pathloss.user_power_dB = p.at("user_power_dB");
    if (p.contains("intercept_dB")) cfg.pathloss.intercept_dB = p.at("intercept_dB");
    if (p.contains("slope")) cfg.pathloss.slope = p.at("slope");
    if (p.contains("min_distance_km")) cfg.pathloss.min_distance_km = p.at("min_distance_km");
  }
  if (j.contains("radius_m")) cfg.radius_m = j.at("radius_m");
  if (j.contains("K_list")) cfg.K_list = j.at("K_list").get<std::vector<int>>();
  if (j.contains("s_list")) cfg.s_list = j.at("s_list").get<std::vector<double>>();
  if (j.contains("eps")) cfg.eps = j.at("eps");
  if (j.contains("trials")) cfg.trials = j.at("trials");
  if (j.contains("realizations")) cfg.realizations = j.at("realizations");
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("metrics")) cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (j.contains("estimators"))
    cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
  if (j.contains("threads")) cfg.threads = j.at("threads");
  if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points");
  if (j.contains("record_runtime")) cfg.record_runtime = j.at("record_runtime");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return config_from_json_text(buf.str());
}

}  // namespace d2dcast
