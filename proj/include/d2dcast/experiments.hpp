#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dcast/analytic.hpp"
#include "d2dcast/solvers.hpp"
#include "d2dcast/topology.hpp"

namespace d2dcast {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scenario { a, b, c, custom };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Built-in parameter presets: (a) one class close to the station,
// (b) a near class relaying to a far class with no direct link,
// (c) users uniform in a 250 m cell with the log-distance path loss.
ClassModel scenario_a_model();
ClassModel scenario_b_model();
PathlossParams scenario_c_pathloss();

struct ExperimentConfig {
  Scenario scenario = Scenario::a;
  std::optional<ClassModel> model;  // required for custom, ignored for a/b/c
  PathlossParams pathloss{};        // scenario c
  double radius_m = 250.0;
  std::vector<int> K_list{100};
  std::vector<double> s_list;  // required by *_vs_s metrics
  double eps = 0.01;
  std::int64_t trials = 100000;
  int realizations = 100;  // topology draws, scenario c only
  std::uint64_t seed = 1;
  std::vector<std::string> metrics{"multicast_rate", "outage_rate"};
  std::vector<std::string> estimators{"baseline", "collapsed", "asymptotic"};
  int threads = 0;             // parallelism hint, never affects results
  int grid_points = 64;        // optimizer grid for Monte Carlo objectives
  bool record_runtime = false; // wall-clock runtimes make output files non-reproducible

  // The class model the scenario resolves to (a/b/custom). Throws for c.
  const ClassModel& resolved_model() const;

  void validate() const;  // throws ConfigError
};

struct ResultRow {
  std::string scenario;
  std::string metric;
  std::string estimator;
  int K = 0;
  double s = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const ResultRow&) const = default;
};

// Runs every requested (metric, estimator, K) cell; *_vs_s metrics emit one
// row per entry of s_list. Scenario (c) rows are means over `realizations`
// topology draws with the between-realization standard error. Output is
// sorted by (scenario, metric, estimator, K, s).
std::vector<ResultRow> run_scenario(const ExperimentConfig& config);

// format is "csv" or "json". CSV header:
// scenario,metric,estimator,K,s,value,stderr,runtime_ms,seed
// Numbers carry 17 significant digits (round-trip exact).
void write_results(const std::vector<ResultRow>& rows, const std::string& path,
                   const std::string& format);

std::vector<ResultRow> read_results(const std::string& path, const std::string& format);

// JSON configuration document (see README for the schema). Gains accept
// plain linear numbers, {"dB": x}, or {"value": x, "unit": "dB"}.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace d2dcast
