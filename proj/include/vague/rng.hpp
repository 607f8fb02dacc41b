#pragma once

#include <cstdint>
#include <initializer_list>

#include "vague/errors.hpp"

namespace vague {

/// Counter-based splittable pseudorandom generator (splitmix64 core).
/// Streams are derived by key mixing, so substreams for (seed, id, ...) are
/// reproducible and independent of evaluation order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix(0x9e3779b97f4a7c15ULL, seed)) {}
  Rng(std::initializer_list<uint64_t> key) : state_(0x9e3779b97f4a7c15ULL) {
    for (uint64_t k : key) state_ = mix(state_, k);
  }

  /// Derive the seed of an independent substream.
  static uint64_t derive(uint64_t seed, uint64_t id) { return mix(seed, id); }
  static uint64_t derive(uint64_t seed, uint64_t a, uint64_t b) {
    return mix(mix(seed, a), b);
  }

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1] (safe as an inverse-CDF argument).
  double uniform01_pos() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next() % uint64_t(hi - lo + 1));
  }

  /// Poisson count by sequential inversion; adequate for the moderate means
  /// used here.
  int poisson(double lambda);

  /// Binomial(n, p) by sequential inversion.
  int binomial(int n, double p);

 private:
  static uint64_t mix(uint64_t a, uint64_t b) {
    return finalize(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
  }
  static uint64_t finalize(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }
  uint64_t state_;
};

}  // namespace vague
