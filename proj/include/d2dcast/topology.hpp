#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace d2dcast {

// Small dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Block (class) model: C user classes with proportions alpha and a
// (C+1)x(C+1) mean-gain matrix g in linear scale. Index 0 is the station;
// only row 0 (station -> class) and the CxC user block are meaningful.
struct ClassModel {
  std::vector<double> alpha;  // size C, strictly positive, sums to 1
  Matrix g;                   // (C+1)x(C+1), entries >= 0
  double g_max = 0.0;         // largest entry of g

  int num_classes() const { return static_cast<int>(alpha.size()); }

  // Validates invariants and caches g_max. Throws std::invalid_argument.
  static ClassModel make(std::vector<double> alpha, Matrix g);
};

// Path-loss law of the geometric scenario: gain_dB = rho_tx + intercept
// - slope * log10(d_km), with rho depending on whether the transmitter is
// the station. Gains are relative to unit-variance noise.
struct PathlossParams {
  double station_power_dB = 46.0;
  double user_power_dB = 23.0;
  double intercept_dB = -128.0;
  double slope = 36.4;
  double min_distance_km = 0.001;
};

// Per-link mean channel gains for one realized network of K users plus the
// station (index 0). Self-gains are zero by convention. Block-structured
// instances keep the class model and never materialize the (K+1)^2 matrix.
//
// A separate scale factor supports exact scaling invariance: scaled(lambda)
// multiplies only the factor, and the Monte Carlo engine divides the SNR
// threshold by it, so (lambda*Gamma, lambda*s) reproduces the unscaled
// computation bit for bit whenever (lambda*s)/lambda is exact.
class GainMatrix {
 public:
  static GainMatrix dense(Matrix gamma);
  static GainMatrix block(ClassModel model, std::vector<int> class_of);

  int num_users() const { return K_; }

  // Mean gain of the link from transmitter i to receiver j, 0 <= i,j <= K.
  double gamma(int i, int j) const { return scale_ * base_gamma(i, j); }
  double station_gain(int i) const { return gamma(0, i); }

  bool has_classes() const { return model_.has_value(); }
  const ClassModel& model() const { return *model_; }
  // class_of[i-1] is the class of user i, 1-based.
  const std::vector<int>& class_of() const { return class_of_; }

  double scale() const { return scale_; }
  GainMatrix scaled(double lambda) const;

  // Gain before the scale factor is applied.
  double base_gamma(int i, int j) const;

 private:
  GainMatrix() = default;
  int K_ = 0;
  double scale_ = 1.0;
  std::optional<Matrix> dense_;
  std::optional<ClassModel> model_;
  std::vector<int> class_of_;
};

// 10^(x/10): dB relative to unit noise power -> linear SNR scale.
double db_to_linear(double x_dB);

// Largest-remainder apportionment of K users among the class proportions.
// Returns per-class counts (size C). Throws if a class ends up empty.
std::vector<int> apportion_classes(const std::vector<double>& alpha, int K);

// Users assigned to classes in proportion alpha (first block is class 1,
// and so on), gains filled from g, self-gains zero.
GainMatrix block_gain_matrix(const ClassModel& model, int K);

// K users drawn uniformly in the disk of the given radius with the station
// at the center; pairwise gains from the path-loss law, distances clamped
// to min_distance_km. Deterministic in seed.
GainMatrix geometric_gain_matrix(double radius_m, int K, const PathlossParams& params,
                                 std::uint64_t seed);

// Classes violating two-hop reachability: no c' with g(0,c')*g(c',c) > 0.
// Empty result means every class is reachable in two transmissions.
std::vector<int> validate_two_hop(const ClassModel& model);

}  // namespace d2dcast
