#include "d2dcast/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "d2dcast/analytic.hpp"

namespace d2dcast {

namespace {

constexpr double kGridSMin = 1e-6;
constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt(5)-1)/2

// Bisection on a nonincreasing probability curve: finds s with P(s) = target.
// The bracket invariant P(lo) >= target > P(hi) is checked every iteration.
SchemeEval outage_bisect(const std::function<double(double)>& prob, double eps, double tol,
                         const char* source) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("outage solver: eps not in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("outage solver: tol must be > 0");
  const double target = 1.0 - eps;

  double lo = 0.0;
  double p_lo = prob(0.0);
  double hi = 1.0;
  double p_hi = prob(hi);
  int doublings = 0;
  while (p_hi >= target) {
    lo = hi;
    p_lo = p_hi;
    hi *= 2.0;
    p_hi = prob(hi);
    if (++doublings > 1100)
      throw std::runtime_error("outage solver: failed to bracket the root (is the network "
                               "two-hop reachable?)");
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const double p = prob(mid);
    if (p >= target) {
      lo = mid;
      p_lo = p;
    } else {
      hi = mid;
      p_hi = p;
    }
    if (!(p_lo >= target) || p_hi >= target)
      throw std::runtime_error("outage solver: bracket invariant violated (non-monotone curve)");
  }
  const double s = 0.5 * (lo + hi);
  return {s, 0.5 * std::log2(1.0 + s), prob(s), 0.0, source};
}

}  // namespace

double default_s_max(const ClassModel& model) {
  double max_g0 = 0.0;
  for (int c = 1; c <= model.num_classes(); ++c)
    max_g0 = std::max(max_g0, model.g(0, static_cast<std::size_t>(c)));
  return 1e3 * std::max(max_g0, 1.0) * M_LN2;
}

double default_s_max(const GainMatrix& gm) {
  double max_g0 = 0.0;
  for (int i = 1; i <= gm.num_users(); ++i) max_g0 = std::max(max_g0, gm.gamma(0, i));
  return 1e3 * std::max(max_g0, 1.0) * M_LN2;
}

SchemeEval maximize_effective_rate(const std::function<double(double)>& objective,
                                   double prefactor, double s_max, int grid_points, double tol) {
  if (grid_points < 16)
    throw std::invalid_argument("maximize_effective_rate: grid_points must be >= 16");
  if (!(s_max > kGridSMin))
    throw std::invalid_argument("maximize_effective_rate: s_max too small");
  if (!(tol > 0.0)) throw std::invalid_argument("maximize_effective_rate: tol must be > 0");

  const auto rate_at = [&](double s) {
    const double p = objective(s);
    const double r = prefactor * std::log2(1.0 + s) * p;
    if (!std::isfinite(r))
      throw std::runtime_error("maximize_effective_rate: non-finite objective at s=" +
                               std::to_string(s));
    return r;
  };

  const int n = grid_points;
  const double log_lo = std::log(kGridSMin);
  const double log_hi = std::log(s_max);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    grid[static_cast<std::size_t>(k)] = std::exp(log_lo + (log_hi - log_lo) * k / (n - 1));
  grid.back() = s_max;

  int best = 0;
  double best_val = rate_at(grid[0]);
  for (int k = 1; k < n; ++k) {
    const double v = rate_at(grid[static_cast<std::size_t>(k)]);
    if (v > best_val) {  // strict: ties keep the smallest s
      best_val = v;
      best = k;
    }
  }

  double a = grid[static_cast<std::size_t>(std::max(best - 1, 0))];
  double b = grid[static_cast<std::size_t>(std::min(best + 1, n - 1))];
  double fa = rate_at(a);
  double fb = rate_at(b);
  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = rate_at(x1);
  double f2 = rate_at(x2);
  int iters = 0;
  while (b - a > tol * (std::abs(b) + 1e-300) && ++iters < 300) {
    if (f1 >= f2) {
      b = x2;
      fb = f2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = rate_at(x1);
    } else {
      a = x1;
      fa = f1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = rate_at(x2);
    }
  }

  // Smallest s wins ties, and endpoints stay in contention so a monotone
  // objective resolves to s_max itself.
  double s_best = a;
  double v_best = fa;
  for (const auto& [s, v] : {std::pair{x1, f1}, std::pair{x2, f2}, std::pair{b, fb},
                             std::pair{grid[static_cast<std::size_t>(best)], best_val}}) {
    if (v > v_best || (v == v_best && s < s_best)) {
      v_best = v;
      s_best = s;
    }
  }

  SchemeEval eval;
  eval.s = s_best;
  eval.rate = prefactor * std::log2(1.0 + s_best);
  eval.probability = objective(s_best);
  eval.source = "analytic";
  return eval;
}

SchemeEval solve_outage_snr_asymptotic(const ClassModel& model, double eps, double tol) {
  return outage_bisect([&model](double s) { return asymptotic_outage_prob(model, s); }, eps, tol,
                       "analytic");
}

SchemeEval solve_outage_snr_asymptotic(const GainMatrix& gm, double eps, double tol) {
  return outage_bisect([&gm](double s) { return asymptotic_outage_prob(gm, s); }, eps, tol,
                       "analytic");
}

SchemeEval solve_outage_snr_mc(const GainMatrix& gm, double eps, std::int64_t trials,
                               std::uint64_t seed, double tol, int threads, bool use_full) {
  // Common random numbers: the same seed at every s keeps the sampled
  // P_+ curve monotone, so plain bisection applies.
  const auto prob = [&](double s) {
    const SimEstimate est = use_full ? simulate_full(gm, s, trials, seed, threads)
                                     : simulate_collapsed(gm, s, trials, seed, threads);
    return est.all_success;
  };
  SchemeEval eval = outage_bisect(prob, eps, tol, "mc");
  const SimEstimate at_root = use_full ? simulate_full(gm, eval.s, trials, seed, threads)
                                       : simulate_collapsed(gm, eval.s, trials, seed, threads);
  if (!(at_root.stderr_all < eps / 4.0))
    throw std::runtime_error("solve_outage_snr_mc: stderr(P_+)=" +
                             std::to_string(at_root.stderr_all) +
                             " too large for eps=" + std::to_string(eps) +
                             "; increase the trial budget");
  eval.probability = at_root.all_success;
  eval.std_error = at_root.stderr_all;
  return eval;
}

}  // namespace d2dcast
