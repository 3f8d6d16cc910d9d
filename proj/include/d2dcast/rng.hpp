#pragma once

#include <cmath>
#include <cstdint>

namespace d2dcast::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele, Lea & Flood).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child key from (key, substream). Used for nested seeding:
// master seed -> realization -> trial. Order-sensitive on purpose.
inline constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t substream) {
  return mix64((key + kGolden) ^ mix64(substream + kGolden));
}

// Maps 64 random bits to a double strictly inside (0, 1).
inline constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Counter-based uniform stream: the n-th draw is a pure function of
// (seed, substream, n), so trials can run in any order on any number of
// threads and still produce identical numbers.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t substream)
      : key_(derive(mix64(seed), substream)) {}

  double uniform() { return to_unit(mix64(key_ + kGolden * ++counter_)); }

  // Draws from the exponential distribution with the given mean.
  double exponential(double mean) { return -mean * std::log(uniform()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace d2dcast::rng
