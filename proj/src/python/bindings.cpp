#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "d2dcast/analytic.hpp"
#include "d2dcast/experiments.hpp"
#include "d2dcast/mc_engine.hpp"
#include "d2dcast/solvers.hpp"
#include "d2dcast/topology.hpp"

namespace py = pybind11;
using namespace d2dcast;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("gain matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

py::list rows_to_pylist(const std::vector<ResultRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["scenario"] = r.scenario;
    d["metric"] = r.metric;
    d["estimator"] = r.estimator;
    d["K"] = r.K;
    d["s"] = r.s;
    d["value"] = r.value;
    d["stderr"] = r.std_error;
    d["runtime_ms"] = r.runtime_ms;
    d["seed"] = r.seed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-slot device-to-device aided multicast: simulation, analysis, optimization";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("db_to_linear", &db_to_linear, py::arg("x_dB"));

  py::class_<ClassModel>(m, "ClassModel")
      .def(py::init([](const std::vector<double>& alpha,
                       const std::vector<std::vector<double>>& g) {
             return ClassModel::make(alpha, matrix_from_rows(g));
           }),
           py::arg("alpha"), py::arg("g"),
           "g is the (C+1)x(C+1) mean-gain matrix in linear scale; row/col 0 is the station")
      .def_property_readonly("alpha", [](const ClassModel& mdl) { return mdl.alpha; })
      .def_property_readonly("num_classes", &ClassModel::num_classes)
      .def("g", [](const ClassModel& mdl, std::size_t i, std::size_t j) { return mdl.g(i, j); },
           py::arg("i"), py::arg("j"));

  m.def("scenario_a_model", &scenario_a_model);
  m.def("scenario_b_model", &scenario_b_model);

  py::class_<PathlossParams>(m, "PathlossParams")
      .def(py::init<>())
      .def_readwrite("station_power_dB", &PathlossParams::station_power_dB)
      .def_readwrite("user_power_dB", &PathlossParams::user_power_dB)
      .def_readwrite("intercept_dB", &PathlossParams::intercept_dB)
      .def_readwrite("slope", &PathlossParams::slope)
      .def_readwrite("min_distance_km", &PathlossParams::min_distance_km);

  py::class_<GainMatrix>(m, "GainMatrix")
      .def_static("dense",
                  [](const std::vector<std::vector<double>>& gamma) {
                    return GainMatrix::dense(matrix_from_rows(gamma));
                  },
                  py::arg("gamma"), "(K+1)x(K+1) per-link mean gains; index 0 is the station")
      .def_static("block", [](const ClassModel& mdl, int K) { return block_gain_matrix(mdl, K); },
                  py::arg("model"), py::arg("K"))
      .def_static("geometric",
                  [](double radius_m, int K, std::uint64_t seed, const PathlossParams& p) {
                    return geometric_gain_matrix(radius_m, K, p, seed);
                  },
                  py::arg("radius_m"), py::arg("K"), py::arg("seed"),
                  py::arg("pathloss") = PathlossParams{})
      .def_property_readonly("num_users", &GainMatrix::num_users)
      .def("gamma", &GainMatrix::gamma, py::arg("i"), py::arg("j"))
      .def("scaled", &GainMatrix::scaled, py::arg("lam"))
      .def_property_readonly("scale", &GainMatrix::scale);

  py::class_<SimEstimate>(m, "SimEstimate")
      .def_readonly("s", &SimEstimate::s)
      .def_readonly("per_user_success", &SimEstimate::per_user_success)
      .def_readonly("mean_success", &SimEstimate::mean_success)
      .def_readonly("all_success", &SimEstimate::all_success)
      .def_readonly("stderr_mean", &SimEstimate::stderr_mean)
      .def_readonly("stderr_all", &SimEstimate::stderr_all)
      .def_readonly("trials", &SimEstimate::trials)
      .def_readonly("estimator", &SimEstimate::estimator);

  m.def("simulate_full", &simulate_full, py::arg("gain_matrix"), py::arg("s"), py::arg("trials"),
        py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("simulate_collapsed", &simulate_collapsed, py::arg("gain_matrix"), py::arg("s"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("simulate_baseline", &simulate_baseline, py::arg("gain_matrix"), py::arg("s"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<SchemeEval>(m, "SchemeEval")
      .def_readonly("s", &SchemeEval::s)
      .def_readonly("rate", &SchemeEval::rate)
      .def_readonly("probability", &SchemeEval::probability)
      .def_readonly("std_error", &SchemeEval::std_error)
      .def_readonly("source", &SchemeEval::source);

  m.def("baseline_mean_success", &baseline_mean_success, py::arg("model"), py::arg("s"));
  m.def("baseline_multicast_rate", &baseline_multicast_rate, py::arg("model"),
        py::arg("s_max") = 0.0, py::arg("tol") = 1e-9);
  m.def("baseline_outage_rate", &baseline_outage_rate, py::arg("model"), py::arg("K"),
        py::arg("eps"));
  m.def("beta_thresholds",
        [](const ClassModel& mdl) {
          const BetaThresholds bt = beta_thresholds(mdl);
          return py::make_tuple(bt.beta_c, bt.beta_star);
        },
        py::arg("model"), "returns (beta_c list, beta_star)");
  m.def("phase_limit_mean_success", &phase_limit_mean_success, py::arg("model"), py::arg("beta"));
  m.def("approx_failure_prob", &approx_failure_prob, py::arg("model"), py::arg("class_index"),
        py::arg("beta"), py::arg("K"));
  m.def("approx_mean_success", &approx_mean_success, py::arg("model"), py::arg("s"),
        py::arg("K"));
  m.def("asymptotic_outage_prob",
        py::overload_cast<const ClassModel&, double>(&asymptotic_outage_prob), py::arg("model"),
        py::arg("s"));
  m.def("asymptotic_outage_prob",
        py::overload_cast<const GainMatrix&, double>(&asymptotic_outage_prob),
        py::arg("gain_matrix"), py::arg("s"));
  m.def("outage_snr_taylor", &outage_snr_taylor, py::arg("model"), py::arg("eps"));

  m.def("maximize_effective_rate", &maximize_effective_rate, py::arg("objective"),
        py::arg("prefactor"), py::arg("s_max"), py::arg("grid_points") = 256,
        py::arg("tol") = 1e-6);
  m.def("default_s_max", py::overload_cast<const ClassModel&>(&default_s_max), py::arg("model"));
  m.def("default_s_max", py::overload_cast<const GainMatrix&>(&default_s_max),
        py::arg("gain_matrix"));
  m.def("solve_outage_snr_asymptotic",
        py::overload_cast<const ClassModel&, double, double>(&solve_outage_snr_asymptotic),
        py::arg("model"), py::arg("eps"), py::arg("tol") = 1e-6);
  m.def("solve_outage_snr_asymptotic",
        py::overload_cast<const GainMatrix&, double, double>(&solve_outage_snr_asymptotic),
        py::arg("gain_matrix"), py::arg("eps"), py::arg("tol") = 1e-6);
  m.def("solve_outage_snr_mc", &solve_outage_snr_mc, py::arg("gain_matrix"), py::arg("eps"),
        py::arg("trials"), py::arg("seed"), py::arg("tol") = 1e-3, py::arg("threads") = 0,
        py::arg("use_full") = false, py::call_guard<py::gil_scoped_release>());

  m.def("run_experiments",
        [](const std::string& config_json) {
          std::vector<ResultRow> rows;
          {
            py::gil_scoped_release release;
            rows = run_scenario(config_from_json_text(config_json));
          }
          return rows_to_pylist(rows);
        },
        py::arg("config_json"),
        "runs the experiment grid described by a JSON config string; returns a list of row "
        "dicts sorted by (scenario, metric, estimator, K, s)");
}
