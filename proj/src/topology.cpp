#include "d2dcast/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d2dcast/rng.hpp"

namespace d2dcast {

double db_to_linear(double x_dB) {
  if (!std::isfinite(x_dB)) throw std::invalid_argument("db_to_linear: non-finite input");
  return std::pow(10.0, x_dB / 10.0);
}

ClassModel ClassModel::make(std::vector<double> alpha, Matrix g) {
  const std::size_t C = alpha.size();
  if (C == 0) throw std::invalid_argument("ClassModel: no classes");
  if (g.rows() != C + 1 || g.cols() != C + 1)
    throw std::invalid_argument("ClassModel: g must be (C+1)x(C+1)");

  double sum = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("ClassModel: alpha entries must be strictly positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("ClassModel: alpha must sum to 1 within 1e-12");

  double g_max = 0.0;
  bool station_reaches_someone = false;
  for (std::size_t i = 0; i <= C; ++i) {
    for (std::size_t j = 0; j <= C; ++j) {
      const double v = g(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("ClassModel: g entries must be finite and >= 0");
      g_max = std::max(g_max, v);
      if (i == 0 && j >= 1 && v > 0.0) station_reaches_someone = true;
    }
  }
  if (!station_reaches_someone)
    throw std::invalid_argument("ClassModel: station reaches no class (all g(0,c) are 0)");

  ClassModel m;
  m.alpha = std::move(alpha);
  m.g = std::move(g);
  m.g_max = g_max;
  return m;
}

double GainMatrix::base_gamma(int i, int j) const {
  if (i == j) return 0.0;  // self-gain convention (also station's i=j=0)
  if (dense_) return (*dense_)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  const int ci = i == 0 ? 0 : class_of_[static_cast<std::size_t>(i) - 1];
  const int cj = j == 0 ? 0 : class_of_[static_cast<std::size_t>(j) - 1];
  return model_->g(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj));
}

GainMatrix GainMatrix::dense(Matrix gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() < 2)
    throw std::invalid_argument("GainMatrix: gamma must be square, (K+1)x(K+1) with K >= 1");
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      const double v = gamma(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("GainMatrix: entries must be finite and >= 0");
    }
    if (i >= 1) gamma(i, i) = 0.0;
  }
  GainMatrix gm;
  gm.K_ = static_cast<int>(gamma.rows()) - 1;
  gm.dense_ = std::move(gamma);
  return gm;
}

GainMatrix GainMatrix::block(ClassModel model, std::vector<int> class_of) {
  if (class_of.empty()) throw std::invalid_argument("GainMatrix: no users");
  const int C = model.num_classes();
  for (int c : class_of)
    if (c < 1 || c > C) throw std::invalid_argument("GainMatrix: class index out of range");
  GainMatrix gm;
  gm.K_ = static_cast<int>(class_of.size());
  gm.model_ = std::move(model);
  gm.class_of_ = std::move(class_of);
  return gm;
}

GainMatrix GainMatrix::scaled(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("GainMatrix::scaled: lambda must be positive and finite");
  GainMatrix gm = *this;
  gm.scale_ = scale_ * lambda;
  return gm;
}

std::vector<int> apportion_classes(const std::vector<double>& alpha, int K) {
  if (K < 1) throw std::invalid_argument("apportion_classes: K must be >= 1");
  const std::size_t C = alpha.size();
  std::vector<int> counts(C);
  std::vector<std::pair<double, std::size_t>> remainders(C);
  int assigned = 0;
  for (std::size_t c = 0; c < C; ++c) {
    const double quota = alpha[c] * K;
    counts[c] = static_cast<int>(std::floor(quota));
    remainders[c] = {quota - std::floor(quota), c};
    assigned += counts[c];
  }
  // Largest remainder first; ties broken by lower class index.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < K - assigned; ++k) counts[remainders[static_cast<std::size_t>(k)].second]++;
  for (std::size_t c = 0; c < C; ++c)
    if (counts[c] == 0)
      throw std::invalid_argument("apportion_classes: class " + std::to_string(c + 1) +
                                  " receives zero users at K=" + std::to_string(K));
  return counts;
}

GainMatrix block_gain_matrix(const ClassModel& model, int K) {
  const std::vector<int> counts = apportion_classes(model.alpha, K);
  std::vector<int> class_of;
  class_of.reserve(static_cast<std::size_t>(K));
  for (std::size_t c = 0; c < counts.size(); ++c)
    class_of.insert(class_of.end(), static_cast<std::size_t>(counts[c]), static_cast<int>(c) + 1);
  return GainMatrix::block(model, std::move(class_of));
}

GainMatrix geometric_gain_matrix(double radius_m, int K, const PathlossParams& params,
                                 std::uint64_t seed) {
  if (!(radius_m > 0.0)) throw std::invalid_argument("geometric_gain_matrix: radius must be > 0");
  if (K < 1) throw std::invalid_argument("geometric_gain_matrix: K must be >= 1");
  if (!(params.slope > 0.0) || !(params.min_distance_km > 0.0))
    throw std::invalid_argument("geometric_gain_matrix: invalid path-loss parameters");

  const double radius_km = radius_m / 1000.0;
  rng::Stream stream(seed, 0);
  std::vector<double> x(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> y(static_cast<std::size_t>(K) + 1, 0.0);
  for (int i = 1; i <= K; ++i) {
    // Uniform in area: radius proportional to sqrt(U).
    const double r = radius_km * std::sqrt(stream.uniform());
    const double theta = 2.0 * M_PI * stream.uniform();
    x[static_cast<std::size_t>(i)] = r * std::cos(theta);
    y[static_cast<std::size_t>(i)] = r * std::sin(theta);
  }

  Matrix gamma(static_cast<std::size_t>(K) + 1, static_cast<std::size_t>(K) + 1, 0.0);
  for (int i = 0; i <= K; ++i) {
    const double rho = i == 0 ? params.station_power_dB : params.user_power_dB;
    for (int j = 0; j <= K; ++j) {
      if (i == j) continue;
      const auto ii = static_cast<std::size_t>(i);
      const auto jj = static_cast<std::size_t>(j);
      const double d = std::max(std::hypot(x[ii] - x[jj], y[ii] - y[jj]), params.min_distance_km);
      gamma(ii, jj) = db_to_linear(rho + params.intercept_dB - params.slope * std::log10(d));
    }
  }
  return GainMatrix::dense(std::move(gamma));
}

std::vector<int> validate_two_hop(const ClassModel& model) {
  const int C = model.num_classes();
  std::vector<int> violations;
  for (int c = 1; c <= C; ++c) {
    bool reachable = false;
    for (int cp = 1; cp <= C && !reachable; ++cp)
      reachable = model.g(0, static_cast<std::size_t>(cp)) *
                      model.g(static_cast<std::size_t>(cp), static_cast<std::size_t>(c)) >
                  0.0;
    if (!reachable) violations.push_back(c);
  }
  return violations;
}

}  // namespace d2dcast
