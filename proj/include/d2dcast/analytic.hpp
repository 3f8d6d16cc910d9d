#pragma once

#include <vector>

#include "d2dcast/solvers.hpp"
#include "d2dcast/topology.hpp"

namespace d2dcast {

// Phase-transition coefficients: beta_c is the largest station gain g(0,c')
// among classes c' that can relay to class c; beta_star is their minimum.
// Transmissions at SNR beta*ln K succeed (fail) with high probability for
// beta below (above) beta_c.
struct BetaThresholds {
  std::vector<double> beta_c;  // size C
  double beta_star = 0.0;
};

// Single-slot average success probability: sum_c alpha_c e^{-s/g(0,c)}.
double baseline_mean_success(const ClassModel& model, double s);

// Single-slot multicast rate: max_s log2(1+s) * baseline_mean_success(s).
// s_max <= 0 picks the default bracket; throws if the objective is not
// decreasing at s_max.
SchemeEval baseline_multicast_rate(const ClassModel& model, double s_max = 0.0,
                                   double tol = 1e-9);

// Single-slot outage rate at reliability eps, closed form (no 1/2
// prefactor: one slot). Rate 0 when some g(0,c) = 0.
SchemeEval baseline_outage_rate(const ClassModel& model, int K, double eps);

BetaThresholds beta_thresholds(const ClassModel& model);

// Large-K limit of P-bar(beta ln K): sum_c alpha_c 1{beta < beta_c}.
double phase_limit_mean_success(const ClassModel& model, double beta);

// Finite-K approximation of the conditional slot-2 failure of a user in
// class class_index at threshold beta*ln K (valid for beta < beta_c):
// 1 - exp(-1/v_K) with v_K = sum_c alpha_c g(c,ci) K^{1-beta/g(0,c)} /
// (beta ln K). Throws if beta is outside (0, beta_c).
double approx_failure_prob(const ClassModel& model, int class_index, double beta, int K);

// Finite-K approximation of P-bar(s): classes with s/ln K < beta_c use the
// slot-2 approximation above; others contribute their slot-1 probability
// K^{-beta/g(0,c)} only.
double approx_mean_success(const ClassModel& model, double s, int K);

// Large-K limit of P_+(s) for the two-slot scheme.
double asymptotic_outage_prob(const ClassModel& model, double s);

// Same limit expression evaluated on one realized gain matrix,
// using E[X_i(s)] = sum_j gamma(j,i) e^{-s/gamma(0,j)}.
double asymptotic_outage_prob(const GainMatrix& gm, double s);

// Small-eps Taylor solution of the outage equation:
// s ~ sqrt(ln(1/(1-eps)) / sum_c (alpha_c/g(0,c)) / sum_c' alpha_c' g(c',c)).
double outage_snr_taylor(const ClassModel& model, double eps);

}  // namespace d2dcast
