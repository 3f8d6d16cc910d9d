#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dcast/rng.hpp"
#include "d2dcast/topology.hpp"

namespace d2dcast {

// Probability that a Rayleigh link with mean gain `mean_gain` carries SNR
// threshold s in one slot: exp(-s/gamma), with the s=0 convention that
// decoding always succeeds (|h|^2 >= 0) and exp(-s/0) := 0 for s > 0.
inline double decode_prob(double s, double mean_gain) {
  if (s == 0.0) return 1.0;
  if (mean_gain <= 0.0) return 0.0;
  return std::exp(-s / mean_gain);
}

// Outcome of the first slot for one trial: Z_i = 1 iff user i decoded the
// station broadcast, and X_i the conditional mean of user i's second-slot
// SNR given Z (the decoders retransmit simultaneously).
struct SlotOutcome {
  std::vector<std::uint8_t> Z;
  std::vector<double> X;
};

// Monte Carlo estimates of the decoding probabilities for one SNR point.
struct SimEstimate {
  double s = 0.0;
  std::vector<double> per_user_success;  // P_i estimates, size K
  double mean_success = 0.0;             // P-bar
  double all_success = 0.0;              // P_+
  double stderr_mean = 0.0;
  double stderr_all = 0.0;
  std::int64_t trials = 0;
  std::string estimator;  // "full", "collapsed" or "baseline"
};

// Draws the slot-1 indicators: Z_i independent Bernoulli with success
// probability decode_prob(s, station_gains[i]). One uniform per user, in
// user order (the coupling every estimator shares).
std::vector<std::uint8_t> sample_first_slot(const std::vector<double>& station_gains, double s,
                                            rng::Stream& stream);

// Conditional second-slot mean SNRs X_i = sum_j Z_j gamma(j,i).
std::vector<double> second_slot_means(const GainMatrix& gm, const std::vector<std::uint8_t>& Z);

// Samples both slots. The slot-2 SNR is drawn as an exponential with mean
// X_i, which is the exact distribution of |sum_j Z_j h'_{j,i}|^2.
// Deterministic in (gm, s, trials, seed) regardless of `threads`.
SimEstimate simulate_full(const GainMatrix& gm, double s, std::int64_t trials, std::uint64_t seed,
                          int threads = 0);

// Rao-Blackwellized estimator: samples only Z and integrates the slot-2
// fading out exactly. Per-user failure weight (1-Z_i)(1-e^{-s/X_i}) and
// all-success weight exp(-s sum_i (1-Z_i)/X_i). Strictly lower variance
// than simulate_full at equal trials. Block-structured inputs use the
// per-class decoder-count fast path (O(C^2) gain work per trial).
SimEstimate simulate_collapsed(const GainMatrix& gm, double s, std::int64_t trials,
                               std::uint64_t seed, int threads = 0);

// Single-slot scheme: success = Z_i only.
SimEstimate simulate_baseline(const GainMatrix& gm, double s, std::int64_t trials,
                              std::uint64_t seed, int threads = 0);

}  // namespace d2dcast
