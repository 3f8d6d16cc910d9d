#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "d2dcast/analytic.hpp"
#include "d2dcast/topology.hpp"

using namespace d2dcast;

namespace {

ClassModel single_class_model() {
  Matrix g(2, 2, 0.0);
  g(0, 1) = db_to_linear(46.0);
  g(1, 1) = db_to_linear(23.0);
  return ClassModel::make({1.0}, g);
}

ClassModel near_far_model() {
  Matrix g(3, 3, 0.0);
  g(0, 1) = db_to_linear(46.0);
  g(1, 1) = db_to_linear(23.0);
  g(2, 2) = db_to_linear(23.0);
  g(1, 2) = db_to_linear(13.0);
  g(2, 1) = db_to_linear(13.0);
  return ClassModel::make({0.5, 0.5}, g);
}

}  // namespace

TEST_CASE("baseline mean success") {
  const ClassModel m = single_class_model();
  CHECK(baseline_mean_success(m, 0.0) == 1.0);
  const double g01 = m.g(0, 1);
  CHECK(baseline_mean_success(m, 100.0) == doctest::Approx(std::exp(-100.0 / g01)).epsilon(1e-15));
  // Near-far: the unreachable class contributes nothing for s > 0.
  const ClassModel nf = near_far_model();
  CHECK(baseline_mean_success(nf, 10.0) ==
        doctest::Approx(0.5 * std::exp(-10.0 / g01)).epsilon(1e-15));
  CHECK(baseline_mean_success(nf, 0.0) == 1.0);
  CHECK_THROWS_AS(baseline_mean_success(m, -1.0), std::invalid_argument);
}

TEST_CASE("baseline multicast rate satisfies the stationarity condition") {
  const ClassModel m = single_class_model();
  const SchemeEval e = baseline_multicast_rate(m);
  const double g01 = m.g(0, 1);
  // d/ds [log2(1+s) e^{-s/g}] = 0  <=>  (1+s) ln(1+s) = g.
  CHECK((1.0 + e.s) * std::log1p(e.s) == doctest::Approx(g01).epsilon(1e-6));
  CHECK(e.rate == doctest::Approx(std::log2(1.0 + e.s)).epsilon(1e-15));
  CHECK(e.probability == doctest::Approx(std::exp(-e.s / g01)).epsilon(1e-12));
  CHECK(e.source == "analytic");
}

TEST_CASE("baseline outage rate closed form (frozen values)") {
  const ClassModel m = single_class_model();
  const SchemeEval k100 = baseline_outage_rate(m, 100, 0.01);
  CHECK(k100.s == doctest::Approx(4.0011107697498485).epsilon(1e-14));
  CHECK(k100.rate == doctest::Approx(2.322248559694354).epsilon(1e-14));
  CHECK(k100.probability == doctest::Approx(0.99).epsilon(1e-15));
  const SchemeEval k1000 = baseline_outage_rate(m, 1000, 0.01);
  CHECK(k1000.s == doctest::Approx(0.4001110769749849).epsilon(1e-14));
  CHECK(k1000.rate == doctest::Approx(0.4855412870589008).epsilon(1e-14));
  // K = 1: s = ln(1/(1-eps)) * g01.
  const SchemeEval k1 = baseline_outage_rate(m, 1, 0.01);
  CHECK(k1.s == doctest::Approx(0.010050335853501506 * m.g(0, 1)).epsilon(1e-14));
  // A class the station cannot reach forces rate 0.
  const SchemeEval nf = baseline_outage_rate(near_far_model(), 100, 0.01);
  CHECK(nf.rate == 0.0);
  CHECK(nf.s == 0.0);
  CHECK_THROWS_AS(baseline_outage_rate(m, 0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(baseline_outage_rate(m, 10, 1.5), std::invalid_argument);
}

TEST_CASE("beta thresholds") {
  const BetaThresholds a = beta_thresholds(single_class_model());
  CHECK(a.beta_c.size() == 1);
  CHECK(a.beta_c[0] == doctest::Approx(39810.71705534969).epsilon(1e-14));
  CHECK(a.beta_star == a.beta_c[0]);

  // Near-far: both classes are served through class 1, so both thresholds
  // equal g(0,1).
  const BetaThresholds b = beta_thresholds(near_far_model());
  CHECK(b.beta_c[0] == b.beta_c[1]);
  CHECK(b.beta_star == doctest::Approx(39810.71705534969).epsilon(1e-14));

  // Distinct thresholds: class 2 only hears itself.
  Matrix g(3, 3, 0.0);
  g(0, 1) = 100.0;
  g(0, 2) = 50.0;
  g(1, 1) = 1.0;
  g(2, 2) = 1.0;
  const ClassModel distinct = ClassModel::make({0.5, 0.5}, g);
  const BetaThresholds d = beta_thresholds(distinct);
  CHECK(d.beta_c == std::vector<double>{100.0, 50.0});
  CHECK(d.beta_star == 50.0);

  CHECK(phase_limit_mean_success(distinct, 25.0) == 1.0);
  CHECK(phase_limit_mean_success(distinct, 75.0) == 0.5);
  CHECK(phase_limit_mean_success(distinct, 150.0) == 0.0);
  CHECK_THROWS_AS(phase_limit_mean_success(distinct, 0.0), std::invalid_argument);
}

TEST_CASE("finite-K failure approximation (frozen value)") {
  const ClassModel m = single_class_model();
  const double beta = 0.1 * beta_thresholds(m).beta_star;
  const double p = approx_failure_prob(m, 1, beta, 1000);
  CHECK(p == doctest::Approx(0.24042992070426683).epsilon(1e-12));
  // v_K grows with K, so the failure probability shrinks.
  CHECK(approx_failure_prob(m, 1, beta, 1000000) < p);
  CHECK(approx_failure_prob(m, 1, beta, 1000000) ==
        doctest::Approx(-std::expm1(-1.0 / 911.2405991166438)).epsilon(1e-6));
  CHECK_THROWS_AS(approx_failure_prob(m, 1, 2.0 * beta_thresholds(m).beta_star, 1000),
                  std::domain_error);
  CHECK_THROWS_AS(approx_failure_prob(m, 2, beta, 1000), std::invalid_argument);
  CHECK_THROWS_AS(approx_failure_prob(m, 1, beta, 1), std::invalid_argument);
}

TEST_CASE("approximate mean success is a probability, decreasing in s") {
  const ClassModel m = near_far_model();
  double prev = 1.0 + 1e-12;
  for (double s : {0.0, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
    const double p = approx_mean_success(m, s, 1000);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p <= prev + 1e-9);
    prev = p;
  }
  CHECK(approx_mean_success(m, 0.0, 1000) == 1.0);
}

TEST_CASE("asymptotic outage probability: single-class identity") {
  const ClassModel m = single_class_model();
  const double g01 = m.g(0, 1);
  const double g11 = m.g(1, 1);
  for (double s : {1.0, 50.0, 282.0, 1000.0}) {
    const double direct =
        std::exp(-s * (1.0 - std::exp(-s / g01)) / (g11 * std::exp(-s / g01)));
    CHECK(asymptotic_outage_prob(m, s) == doctest::Approx(direct).epsilon(1e-13));
  }
  CHECK(asymptotic_outage_prob(m, 0.0) == 1.0);
}

TEST_CASE("asymptotic outage on a realized matrix reduces to the class form") {
  // A block matrix whose general form must coincide with the class-model
  // form up to the finite-K composition (alpha exact at this K).
  const ClassModel m = near_far_model();
  const GainMatrix gm = block_gain_matrix(m, 10);
  for (double s : {5.0, 80.0}) {
    // General form divides by E[X_i] = sum_j gamma(j,i) e^{-s/gamma(0,j)};
    // the class form uses K * sum_c' alpha_c' g(c',c) e^{-s/g(0,c')}. The
    // exponent carries 1/K per user, so the two coincide when the class
    // proportions are exact — up to the excluded self term of decoders.
    const double cls = asymptotic_outage_prob(m, s);
    const double gen = asymptotic_outage_prob(gm, s);
    CHECK(std::log(gen) == doctest::Approx(std::log(cls)).epsilon(0.15));
  }
}

TEST_CASE("Taylor outage SNR (frozen value)") {
  const ClassModel m = single_class_model();
  const double s = outage_snr_taylor(m, 0.01);
  CHECK(s == doctest::Approx(282.5467313011778).epsilon(1e-13));
  CHECK_THROWS_AS(outage_snr_taylor(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(outage_snr_taylor(near_far_model(), 0.01), std::domain_error);
}
