#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "d2dcast/analytic.hpp"
#include "d2dcast/mc_engine.hpp"
#include "d2dcast/solvers.hpp"
#include "d2dcast/topology.hpp"

using namespace d2dcast;

namespace {

ClassModel single_class_model() {
  Matrix g(2, 2, 0.0);
  g(0, 1) = db_to_linear(46.0);
  g(1, 1) = db_to_linear(23.0);
  return ClassModel::make({1.0}, g);
}

}  // namespace

TEST_CASE("maximize_effective_rate beats a million-point scan") {
  const double gamma = 500.0;
  const auto objective = [gamma](double s) { return std::exp(-s / gamma); };
  const SchemeEval e = maximize_effective_rate(objective, 1.0, 1e4, 256, 1e-12);

  double scan_best = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    const double s = 1e4 * (k + 1) / 1000000.0;
    scan_best = std::max(scan_best, std::log2(1.0 + s) * objective(s));
  }
  CHECK(e.rate * e.probability >= scan_best - 1e-12);
  // Stationarity: (1+s) ln(1+s) = gamma. The objective is quadratically
  // flat at the top, so s carries about sqrt(eps) relative precision.
  CHECK((1.0 + e.s) * std::log1p(e.s) == doctest::Approx(gamma).epsilon(1e-5));
}

TEST_CASE("maximize_effective_rate: monotone objective resolves to s_max") {
  const SchemeEval e = maximize_effective_rate([](double) { return 1.0; }, 0.5, 100.0, 64, 1e-9);
  CHECK(e.s == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(e.probability == 1.0);
}

TEST_CASE("maximize_effective_rate argument validation") {
  const auto one = [](double) { return 1.0; };
  CHECK_THROWS_AS(maximize_effective_rate(one, 1.0, 100.0, 8, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(maximize_effective_rate(one, 1.0, 0.0, 64, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(maximize_effective_rate(one, 1.0, 100.0, 64, 0.0), std::invalid_argument);
  const auto nan = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(maximize_effective_rate(nan, 1.0, 100.0, 64, 1e-6), std::runtime_error);
}

TEST_CASE("default_s_max covers the optimum") {
  const ClassModel m = single_class_model();
  CHECK(default_s_max(m) == doctest::Approx(1e3 * m.g(0, 1) * M_LN2).epsilon(1e-14));
  const GainMatrix gm = block_gain_matrix(m, 5);
  CHECK(default_s_max(gm) == default_s_max(m));
}

TEST_CASE("asymptotic outage solver hits the exact root") {
  const ClassModel m = single_class_model();
  const SchemeEval e = solve_outage_snr_asymptotic(m, 0.01, 1e-13);
  CHECK(e.s == doctest::Approx(282.0464405528734).epsilon(1e-10));
  CHECK(std::abs(asymptotic_outage_prob(m, e.s) - 0.99) <= 1e-10);
  CHECK(e.rate == doctest::Approx(0.5 * std::log2(1.0 + e.s)).epsilon(1e-15));

  // The matrix overload solves the same equation on a realized block matrix.
  const GainMatrix gm = block_gain_matrix(m, 100);
  const SchemeEval eg = solve_outage_snr_asymptotic(gm, 0.01, 1e-10);
  CHECK(std::abs(asymptotic_outage_prob(gm, eg.s) - 0.99) <= 1e-9);

  CHECK_THROWS_AS(solve_outage_snr_asymptotic(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_outage_snr_asymptotic(m, 0.01, 0.0), std::invalid_argument);
}

TEST_CASE("Monte Carlo outage solver: coverage and determinism") {
  const GainMatrix gm = block_gain_matrix(single_class_model(), 20);
  const double eps = 0.05;
  const SchemeEval a = solve_outage_snr_mc(gm, eps, 20000, 9);
  const SchemeEval b = solve_outage_snr_mc(gm, eps, 20000, 9);
  CHECK(a.s == b.s);
  CHECK(a.probability == b.probability);
  CHECK(a.std_error > 0.0);
  CHECK(a.source == "mc");
  CHECK(std::abs(a.probability - (1.0 - eps)) <= 4.0 * a.std_error + 1e-3);
  // True curve check: the sampled root must sit near the exact finite-K
  // root of E[P_+], which lies within a few percent of the asymptotic one.
  const double s_inf = solve_outage_snr_asymptotic(single_class_model(), eps).s;
  CHECK(std::abs(a.s - s_inf) / s_inf < 0.25);
  // An undersized trial budget cannot certify eps/4 accuracy.
  CHECK_THROWS_AS(solve_outage_snr_mc(gm, 0.001, 100, 9), std::runtime_error);
}
