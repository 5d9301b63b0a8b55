#pragma once

#include <cstdint>
#include <random>

namespace uwloc {

/// SplitMix64 finalizer; spreads two words into one well-mixed 64-bit value.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purpose tags for derived random streams. Every draw site owns a
/// (purpose, index) substream, so adding draws in one place never shifts
/// draws anywhere else.
enum class Stream : std::uint64_t {
  kInit = 1,
  kMeasurement = 2,
  kLoss = 3,
  kTracking = 4,
  kInstance = 5,
  kExperiment = 6,
};

/// Seed for the (purpose, index) substream of a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream purpose,
                                    std::uint64_t index = 0) {
  return mix64(mix64(seed, static_cast<std::uint64_t>(purpose)), index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw from [0, 1).
  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double normal(double mean, double stddev) {
    if (stddev == 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

inline Rng substream(std::uint64_t seed, Stream purpose,
                     std::uint64_t index = 0) {
  return Rng(derive_seed(seed, purpose, index));
}

}  // namespace uwloc
