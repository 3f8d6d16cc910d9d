#include "d2dcast/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace d2dcast {

namespace {

// e^{-s/g} with the conventions e^{-s/0} := 0 for s > 0 and := 1 for s = 0.
double exp_ratio(double s, double g) {
  if (s == 0.0) return 1.0;
  if (g <= 0.0) return 0.0;
  return std::exp(-s / g);
}

}  // namespace

double baseline_mean_success(const ClassModel& model, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("baseline_mean_success: s must be >= 0");
  double p = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c)
    p += model.alpha[static_cast<std::size_t>(c) - 1] *
         exp_ratio(s, model.g(0, static_cast<std::size_t>(c)));
  return p;
}

SchemeEval baseline_multicast_rate(const ClassModel& model, double s_max, double tol) {
  double max_g0 = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c)
    max_g0 = std::max(max_g0, model.g(0, static_cast<std::size_t>(c)));
  if (max_g0 == 0.0) return {0.0, 0.0, 1.0, 0.0, "analytic"};

  if (s_max <= 0.0) s_max = 1e3 * max_g0 * M_LN2;
  const auto objective = [&model](double s) { return baseline_mean_success(model, s); };
  const auto rate_at = [&](double s) { return std::log2(1.0 + s) * objective(s); };
  if (rate_at(s_max) > rate_at(0.5 * s_max))
    throw std::runtime_error("baseline_multicast_rate: objective not decreasing at s_max");
  SchemeEval eval = maximize_effective_rate(objective, 1.0, s_max, 256, tol);
  eval.source = "analytic";
  return eval;
}

SchemeEval baseline_outage_rate(const ClassModel& model, int K, double eps) {
  if (K < 1) throw std::invalid_argument("baseline_outage_rate: K must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("baseline_outage_rate: eps must be in (0,1)");
  double inv_sum = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c) {
    const double g0 = model.g(0, static_cast<std::size_t>(c));
    if (g0 <= 0.0) return {0.0, 0.0, 1.0, 0.0, "analytic"};  // P_+ < 1-eps for all s > 0
    inv_sum += model.alpha[static_cast<std::size_t>(c) - 1] / g0;
  }
  const double s = std::log1p(eps / (1.0 - eps)) / (K * inv_sum);
  return {s, std::log2(1.0 + s), 1.0 - eps, 0.0, "analytic"};
}

BetaThresholds beta_thresholds(const ClassModel& model) {
  const int C = model.num_classes();
  BetaThresholds bt;
  bt.beta_c.resize(static_cast<std::size_t>(C), 0.0);
  bt.beta_star = std::numeric_limits<double>::infinity();
  for (int c = 1; c <= C; ++c) {
    double best = 0.0;
    for (int cp = 1; cp <= C; ++cp)
      if (model.g(static_cast<std::size_t>(cp), static_cast<std::size_t>(c)) > 0.0)
        best = std::max(best, model.g(0, static_cast<std::size_t>(cp)));
    bt.beta_c[static_cast<std::size_t>(c) - 1] = best;
    bt.beta_star = std::min(bt.beta_star, best);
  }
  return bt;
}

double phase_limit_mean_success(const ClassModel& model, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("phase_limit_mean_success: beta must be > 0");
  const BetaThresholds bt = beta_thresholds(model);
  double p = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c)
    if (beta < bt.beta_c[static_cast<std::size_t>(c) - 1])
      p += model.alpha[static_cast<std::size_t>(c) - 1];
  return p;
}

double approx_failure_prob(const ClassModel& model, int class_index, double beta, int K) {
  const int C = model.num_classes();
  if (class_index < 1 || class_index > C)
    throw std::invalid_argument("approx_failure_prob: class index out of range");
  if (K < 2) throw std::invalid_argument("approx_failure_prob: K must be >= 2");
  const double beta_c = beta_thresholds(model).beta_c[static_cast<std::size_t>(class_index) - 1];
  if (!(beta > 0.0) || beta >= beta_c)
    throw std::domain_error("approx_failure_prob: beta=" + std::to_string(beta) +
                            " outside validity region (0, " + std::to_string(beta_c) + ")");
  const double ln_K = std::log(static_cast<double>(K));
  double denom = 0.0;
  for (int c = 1; c <= C; ++c) {
    const double g0 = model.g(0, static_cast<std::size_t>(c));
    if (g0 <= 0.0) continue;  // K^{1-beta/0} := 0, zero-gain station links contribute nothing
    denom += model.alpha[static_cast<std::size_t>(c) - 1] *
             model.g(static_cast<std::size_t>(c), static_cast<std::size_t>(class_index)) *
             std::exp((1.0 - beta / g0) * ln_K);
  }
  if (denom <= 0.0) return 1.0;
  return -std::expm1(-beta * ln_K / denom);
}

double approx_mean_success(const ClassModel& model, double s, int K) {
  if (!(s >= 0.0)) throw std::invalid_argument("approx_mean_success: s must be >= 0");
  if (K < 2) throw std::invalid_argument("approx_mean_success: K must be >= 2");
  if (s == 0.0) return 1.0;
  const double beta = s / std::log(static_cast<double>(K));
  const BetaThresholds bt = beta_thresholds(model);
  double p = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c) {
    const double alpha = model.alpha[static_cast<std::size_t>(c) - 1];
    if (beta < bt.beta_c[static_cast<std::size_t>(c) - 1]) {
      p += alpha * (1.0 - approx_failure_prob(model, c, beta, K));
    } else {
      // Past the class threshold the relay slot carries nothing; only the
      // slot-1 probability K^{-beta/g(0,c)} = e^{-s/g(0,c)} remains.
      p += alpha * exp_ratio(s, model.g(0, static_cast<std::size_t>(c)));
    }
  }
  return p;
}

double asymptotic_outage_prob(const ClassModel& model, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("asymptotic_outage_prob: s must be >= 0");
  if (s == 0.0) return 1.0;
  const int C = model.num_classes();
  double exponent = 0.0;
  for (int c = 1; c <= C; ++c) {
    const double numer = model.alpha[static_cast<std::size_t>(c) - 1] *
                         (1.0 - exp_ratio(s, model.g(0, static_cast<std::size_t>(c))));
    if (numer == 0.0) continue;
    double denom = 0.0;
    double relay_mass = 0.0;
    for (int cp = 1; cp <= C; ++cp) {
      const double mass = model.alpha[static_cast<std::size_t>(cp) - 1] *
                          model.g(static_cast<std::size_t>(cp), static_cast<std::size_t>(c)) *
                          (model.g(0, static_cast<std::size_t>(cp)) > 0.0 ? 1.0 : 0.0);
      relay_mass += mass;
      denom += mass * exp_ratio(s, model.g(0, static_cast<std::size_t>(cp)));
    }
    if (denom <= 0.0) {
      if (relay_mass > 0.0) return 0.0;  // e^{-s/g} underflowed: certain outage at this s
      throw std::runtime_error(
          "asymptotic_outage_prob: zero relay mass for class " + std::to_string(c) +
          " (two-hop reachability violated)");
    }
    exponent += numer / denom;
  }
  return std::exp(-s * exponent);
}

double asymptotic_outage_prob(const GainMatrix& gm, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("asymptotic_outage_prob: s must be >= 0");
  if (s == 0.0) return 1.0;
  const int K = gm.num_users();
  double exponent = 0.0;
  for (int i = 1; i <= K; ++i) {
    const double numer = 1.0 - exp_ratio(s, gm.gamma(0, i));
    if (numer == 0.0) continue;
    double mean_x = 0.0;
    double relay_mass = 0.0;
    for (int j = 1; j <= K; ++j) {
      const double mass = gm.gamma(j, i) * (gm.gamma(0, j) > 0.0 ? 1.0 : 0.0);
      relay_mass += mass;
      mean_x += mass * exp_ratio(s, gm.gamma(0, j));
    }
    if (mean_x <= 0.0) {
      if (relay_mass > 0.0) return 0.0;  // e^{-s/gamma} underflowed: certain outage
      throw std::runtime_error("asymptotic_outage_prob: user " + std::to_string(i) +
                               " has no expected relay power");
    }
    exponent += numer / mean_x;
  }
  return std::exp(-s * exponent);
}

double outage_snr_taylor(const ClassModel& model, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("outage_snr_taylor: eps must be in (0,1)");
  const int C = model.num_classes();
  double denom = 0.0;
  for (int c = 1; c <= C; ++c) {
    const double g0 = model.g(0, static_cast<std::size_t>(c));
    if (g0 <= 0.0)
      throw std::domain_error("outage_snr_taylor: g(0," + std::to_string(c) +
                              ") = 0, formula undefined; use the exact solver");
    double relay_mass = 0.0;
    for (int cp = 1; cp <= C; ++cp)
      relay_mass += model.alpha[static_cast<std::size_t>(cp) - 1] *
                    model.g(static_cast<std::size_t>(cp), static_cast<std::size_t>(c));
    if (relay_mass <= 0.0)
      throw std::domain_error("outage_snr_taylor: class " + std::to_string(c) +
                              " has no relay mass");
    denom += model.alpha[static_cast<std::size_t>(c) - 1] / g0 / relay_mass;
  }
  return std::sqrt(std::log1p(eps / (1.0 - eps)) / denom);
}

}  // namespace d2dcast
