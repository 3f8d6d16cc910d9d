#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "d2dcast/mc_engine.hpp"
#include "d2dcast/topology.hpp"

namespace d2dcast {

// One SNR operating point of a scheme: the threshold s, the rate paired
// with it (rate = prefactor * log2(1+s); prefactor 1/2 for the two-slot
// scheme, 1 for the baseline) and the probability backing it (P-bar for
// multicast, P_+ for outage). std_error is nonzero for Monte Carlo sources.
struct SchemeEval {
  double s = 0.0;
  double rate = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  std::string source;  // "analytic", "mc" or "approx"
};

// Maximizes prefactor * log2(1+s) * objective(s) over s in [1e-6, s_max]:
// log-spaced grid scan, then golden-section refinement around the best grid
// cell down to relative width tol. The result is never worse than the best
// grid point. Ties go to the smallest s.
SchemeEval maximize_effective_rate(const std::function<double(double)>& objective,
                                   double prefactor, double s_max, int grid_points = 256,
                                   double tol = 1e-6);

// Default optimization bracket: 10^3 * max_c g(0,c) * ln 2.
double default_s_max(const ClassModel& model);
double default_s_max(const GainMatrix& gm);

// Solves P_inf(s) = 1-eps for the large-system outage probability of the
// two-slot scheme (doubling bracket + bisection to relative width tol).
SchemeEval solve_outage_snr_asymptotic(const ClassModel& model, double eps, double tol = 1e-6);

// Same equation evaluated on one realized gain matrix instead of the class
// limit (used for the geometric scenario where no classes exist).
SchemeEval solve_outage_snr_asymptotic(const GainMatrix& gm, double eps, double tol = 1e-6);

// Bisection on the Monte Carlo P_+ estimate with common random numbers
// (the same seed at every s, making the sampled objective monotone).
// use_full selects the full-sampling estimator; default is collapsed.
// Throws if the achieved standard error at the root is not below eps/4.
SchemeEval solve_outage_snr_mc(const GainMatrix& gm, double eps, std::int64_t trials,
                               std::uint64_t seed, double tol = 1e-3, int threads = 0,
                               bool use_full = false);

}  // namespace d2dcast
