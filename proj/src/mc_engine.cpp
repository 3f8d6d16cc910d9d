#include "d2dcast/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

namespace d2dcast {

std::vector<std::uint8_t> sample_first_slot(const std::vector<double>& station_gains, double s,
                                            rng::Stream& stream) {
  if (!(s >= 0.0)) throw std::invalid_argument("sample_first_slot: s must be >= 0");
  std::vector<std::uint8_t> Z(station_gains.size());
  for (std::size_t i = 0; i < station_gains.size(); ++i)
    Z[i] = stream.uniform() < decode_prob(s, station_gains[i]) ? 1 : 0;
  return Z;
}

std::vector<double> second_slot_means(const GainMatrix& gm, const std::vector<std::uint8_t>& Z) {
  const int K = gm.num_users();
  std::vector<double> X(static_cast<std::size_t>(K), 0.0);
  for (int j = 1; j <= K; ++j) {
    if (!Z[static_cast<std::size_t>(j) - 1]) continue;
    for (int i = 1; i <= K; ++i) X[static_cast<std::size_t>(i) - 1] += gm.gamma(j, i);
  }
  return X;
}

namespace {

enum class Kind { full, collapsed, baseline };

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Per-chunk accumulator. Chunks are merged in index order so results do not
// depend on which thread ran which chunk.
struct Accum {
  std::vector<double> user_fail;
  Kahan sum_m, sumsq_m, sum_a, sumsq_a;
  std::int64_t n = 0;
  explicit Accum(int K) : user_fail(static_cast<std::size_t>(K), 0.0) {}

  void record(double m_stat, double a_stat) {
    sum_m.add(m_stat);
    sumsq_m.add(m_stat * m_stat);
    sum_a.add(a_stat);
    sumsq_a.add(a_stat * a_stat);
    ++n;
  }
  void merge(const Accum& o) {
    for (std::size_t i = 0; i < user_fail.size(); ++i) user_fail[i] += o.user_fail[i];
    sum_m.add(o.sum_m.sum);
    sumsq_m.add(o.sumsq_m.sum);
    sum_a.add(o.sum_a.sum);
    sumsq_a.add(o.sumsq_a.sum);
    n += o.n;
  }
};

struct Ctx {
  const GainMatrix* gm = nullptr;
  Kind kind = Kind::collapsed;
  double s = 0.0;  // threshold divided by the gain-matrix scale factor
  int K = 0;
  bool block = false;
  int C = 0;
  std::vector<double> p_class;  // index 1..C (block path)
  std::vector<int> users_per_class;
  std::vector<double> p_user;  // size K (dense path)
};

struct Scratch {
  std::vector<std::uint8_t> Z;
  std::vector<double> X;  // dense: per user; block: T_c indexed 1..C
  std::vector<int> n_class;
};

void run_trial_block(const Ctx& ctx, std::int64_t trial, std::uint64_t seed, Scratch& scr,
                     Accum& acc) {
  const GainMatrix& gm = *ctx.gm;
  const std::vector<int>& cls = gm.class_of();
  const int K = ctx.K;
  const int C = ctx.C;
  rng::Stream stream(seed, static_cast<std::uint64_t>(trial));

  std::fill(scr.n_class.begin(), scr.n_class.end(), 0);
  for (int i = 0; i < K; ++i) {
    const std::uint8_t z =
        stream.uniform() < ctx.p_class[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])]
            ? 1
            : 0;
    scr.Z[static_cast<std::size_t>(i)] = z;
    scr.n_class[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] += z;
  }

  // Conditional slot-2 mean for a non-decoder of class c (Z_i = 0, so the
  // self term is absent): T_c = sum_c' n_c' g(c',c).
  const ClassModel& model = gm.model();
  for (int c = 1; c <= C; ++c) {
    double T = 0.0;
    for (int cp = 1; cp <= C; ++cp)
      T += scr.n_class[static_cast<std::size_t>(cp)] *
           model.g(static_cast<std::size_t>(cp), static_cast<std::size_t>(c));
    scr.X[static_cast<std::size_t>(c)] = T;
  }

  if (ctx.kind == Kind::baseline) {
    std::int64_t nfail = 0;
    for (int i = 0; i < K; ++i) {
      if (!scr.Z[static_cast<std::size_t>(i)]) {
        acc.user_fail[static_cast<std::size_t>(i)] += 1.0;
        ++nfail;
      }
    }
    acc.record(1.0 - static_cast<double>(nfail) / K, nfail == 0 ? 1.0 : 0.0);
    return;
  }

  if (ctx.kind == Kind::collapsed) {
    double sum_fail = 0.0;
    double ratio_sum = 0.0;
    bool stranded = false;  // some non-decoder has X_i = 0 with s > 0
    std::vector<double> f(static_cast<std::size_t>(C) + 1, 0.0);
    for (int c = 1; c <= C; ++c) {
      const int miss = ctx.users_per_class[static_cast<std::size_t>(c)] -
                       scr.n_class[static_cast<std::size_t>(c)];
      if (miss == 0) continue;
      const double T = scr.X[static_cast<std::size_t>(c)];
      if (T > 0.0) {
        f[static_cast<std::size_t>(c)] = -std::expm1(-ctx.s / T);
        ratio_sum += miss / T;
      } else {
        f[static_cast<std::size_t>(c)] = ctx.s > 0.0 ? 1.0 : 0.0;
        if (ctx.s > 0.0) stranded = true;
      }
      sum_fail += miss * f[static_cast<std::size_t>(c)];
    }
    for (int i = 0; i < K; ++i)
      if (!scr.Z[static_cast<std::size_t>(i)])
        acc.user_fail[static_cast<std::size_t>(i)] +=
            f[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])];
    acc.record(1.0 - sum_fail / K, stranded ? 0.0 : std::exp(-ctx.s * ratio_sum));
    return;
  }

  // full: draw the slot-2 SNR as an exponential with mean X_i. Uniforms are
  // consumed for every user so the draw layout is independent of Z.
  std::int64_t nfail = 0;
  for (int i = 0; i < K; ++i) {
    const double u2 = stream.uniform();
    bool ok = scr.Z[static_cast<std::size_t>(i)] != 0 || ctx.s == 0.0;
    if (!ok) {
      const double X = scr.X[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])];
      ok = X > 0.0 && -X * std::log(u2) >= ctx.s;
    }
    if (!ok) {
      acc.user_fail[static_cast<std::size_t>(i)] += 1.0;
      ++nfail;
    }
  }
  acc.record(1.0 - static_cast<double>(nfail) / K, nfail == 0 ? 1.0 : 0.0);
}

void run_trial_dense(const Ctx& ctx, std::int64_t trial, std::uint64_t seed, Scratch& scr,
                     Accum& acc) {
  const GainMatrix& gm = *ctx.gm;
  const int K = ctx.K;
  rng::Stream stream(seed, static_cast<std::uint64_t>(trial));

  for (int i = 0; i < K; ++i)
    scr.Z[static_cast<std::size_t>(i)] =
        stream.uniform() < ctx.p_user[static_cast<std::size_t>(i)] ? 1 : 0;

  if (ctx.kind == Kind::baseline) {
    std::int64_t nfail = 0;
    for (int i = 0; i < K; ++i) {
      if (!scr.Z[static_cast<std::size_t>(i)]) {
        acc.user_fail[static_cast<std::size_t>(i)] += 1.0;
        ++nfail;
      }
    }
    acc.record(1.0 - static_cast<double>(nfail) / K, nfail == 0 ? 1.0 : 0.0);
    return;
  }

  std::fill(scr.X.begin(), scr.X.end(), 0.0);
  for (int j = 1; j <= K; ++j) {
    if (!scr.Z[static_cast<std::size_t>(j) - 1]) continue;
    for (int i = 1; i <= K; ++i)
      scr.X[static_cast<std::size_t>(i) - 1] += gm.base_gamma(j, i);
  }

  if (ctx.kind == Kind::collapsed) {
    double sum_fail = 0.0;
    double ratio_sum = 0.0;
    bool stranded = false;
    for (int i = 0; i < K; ++i) {
      if (scr.Z[static_cast<std::size_t>(i)]) continue;
      const double X = scr.X[static_cast<std::size_t>(i)];
      double w;
      if (X > 0.0) {
        w = -std::expm1(-ctx.s / X);
        ratio_sum += 1.0 / X;
      } else {
        w = ctx.s > 0.0 ? 1.0 : 0.0;
        if (ctx.s > 0.0) stranded = true;
      }
      acc.user_fail[static_cast<std::size_t>(i)] += w;
      sum_fail += w;
    }
    acc.record(1.0 - sum_fail / K, stranded ? 0.0 : std::exp(-ctx.s * ratio_sum));
    return;
  }

  std::int64_t nfail = 0;
  for (int i = 0; i < K; ++i) {
    const double u2 = stream.uniform();
    bool ok = scr.Z[static_cast<std::size_t>(i)] != 0 || ctx.s == 0.0;
    if (!ok) {
      const double X = scr.X[static_cast<std::size_t>(i)];
      ok = X > 0.0 && -X * std::log(u2) >= ctx.s;
    }
    if (!ok) {
      acc.user_fail[static_cast<std::size_t>(i)] += 1.0;
      ++nfail;
    }
  }
  acc.record(1.0 - static_cast<double>(nfail) / K, nfail == 0 ? 1.0 : 0.0);
}

SimEstimate run_simulation(const GainMatrix& gm, double s, std::int64_t trials,
                           std::uint64_t seed, int threads, Kind kind, const char* name) {
  if (trials < 1) throw std::invalid_argument(std::string(name) + ": trials must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument(std::string(name) + ": s must be >= 0");

  const int K = gm.num_users();
  Ctx ctx;
  ctx.gm = &gm;
  ctx.kind = kind;
  ctx.s = s / gm.scale();
  ctx.K = K;
  ctx.block = gm.has_classes();
  if (ctx.block) {
    const ClassModel& model = gm.model();
    ctx.C = model.num_classes();
    ctx.p_class.assign(static_cast<std::size_t>(ctx.C) + 1, 0.0);
    ctx.users_per_class.assign(static_cast<std::size_t>(ctx.C) + 1, 0);
    for (int c = 1; c <= ctx.C; ++c)
      ctx.p_class[static_cast<std::size_t>(c)] =
          decode_prob(ctx.s, model.g(0, static_cast<std::size_t>(c)));
    for (int c : gm.class_of()) ctx.users_per_class[static_cast<std::size_t>(c)]++;
  } else {
    ctx.p_user.resize(static_cast<std::size_t>(K));
    for (int i = 1; i <= K; ++i)
      ctx.p_user[static_cast<std::size_t>(i) - 1] = decode_prob(ctx.s, gm.base_gamma(0, i));
  }

  // Fixed chunking: a deterministic function of (trials, K) only, never of
  // the thread count. Chunk partials are reduced in index order.
  const std::int64_t mem_cap = std::max<std::int64_t>(1, 16'000'000 / (K + 1));
  const std::int64_t chunks = std::min<std::int64_t>({trials, 64, mem_cap});

  std::vector<std::unique_ptr<Accum>> parts(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    Scratch scr;
    scr.Z.resize(static_cast<std::size_t>(K));
    scr.X.resize(static_cast<std::size_t>(ctx.block ? ctx.C + 1 : K));
    scr.n_class.resize(static_cast<std::size_t>(ctx.C) + 1);
    for (std::int64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      auto acc = std::make_unique<Accum>(K);
      const std::int64_t t0 = trials * c / chunks;
      const std::int64_t t1 = trials * (c + 1) / chunks;
      for (std::int64_t t = t0; t < t1; ++t) {
        if (ctx.block)
          run_trial_block(ctx, t, seed, scr, *acc);
        else
          run_trial_dense(ctx, t, seed, scr, *acc);
      }
      parts[static_cast<std::size_t>(c)] = std::move(acc);
    }
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp<int>(nthreads, 1, static_cast<int>(chunks));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Accum total(K);
  for (const auto& part : parts) total.merge(*part);

  SimEstimate est;
  est.s = s;
  est.trials = trials;
  est.estimator = name;
  est.per_user_success.resize(static_cast<std::size_t>(K));
  double sum_success = 0.0;
  for (int i = 0; i < K; ++i) {
    const double v =
        std::clamp(1.0 - total.user_fail[static_cast<std::size_t>(i)] / trials, 0.0, 1.0);
    est.per_user_success[static_cast<std::size_t>(i)] = v;
    sum_success += v;
  }
  est.mean_success = sum_success / K;
  est.all_success = total.sum_a.sum / trials;
  const auto stderr_of = [trials](const Kahan& sum, const Kahan& sumsq) {
    if (trials < 2) return 0.0;
    const double var = (sumsq.sum - sum.sum * sum.sum / trials) / (trials - 1);
    return std::sqrt(std::max(var, 0.0) / trials);
  };
  est.stderr_mean = stderr_of(total.sum_m, total.sumsq_m);
  est.stderr_all = stderr_of(total.sum_a, total.sumsq_a);
  return est;
}

}  // namespace

SimEstimate simulate_full(const GainMatrix& gm, double s, std::int64_t trials, std::uint64_t seed,
                          int threads) {
  return run_simulation(gm, s, trials, seed, threads, Kind::full, "full");
}

SimEstimate simulate_collapsed(const GainMatrix& gm, double s, std::int64_t trials,
                               std::uint64_t seed, int threads) {
  return run_simulation(gm, s, trials, seed, threads, Kind::collapsed, "collapsed");
}

SimEstimate simulate_baseline(const GainMatrix& gm, double s, std::int64_t trials,
                              std::uint64_t seed, int threads) {
  return run_simulation(gm, s, trials, seed, threads, Kind::baseline, "baseline");
}

}  // namespace d2dcast
