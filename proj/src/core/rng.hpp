#pragma once

#include <cmath>
#include <cstdint>

namespace geomatch {

// Counter-based splittable generator (SplitMix64 finalizer over a per-stream
// Weyl sequence). A generator is a pure function of (seed, stream): replicate
// r of an experiment uses stream = base_stream + r, which makes parallel
// Monte Carlo reproducible regardless of scheduling.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream)
      : state_(mix(seed + mix(stream))), gamma_(mix(stream ^ 0xd1342543de82ef95ULL) | 1ULL) {}

  uint64_t next_u64() {
    state_ += gamma_;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate, by inverse CDF. log1p keeps the
  // u -> 0 branch exact; result is in [0, +inf).
  double next_exp(double rate) { return -std::log1p(-next_double()) / rate; }

  // Uniform integer in {0, ..., n-1} (Lemire multiply-shift; the O(2^-64)
  // bias is irrelevant at Monte Carlo scale).
  uint64_t next_below(uint64_t n) {
    return uint64_t((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
  uint64_t gamma_;
};

// Number of renewal arrivals of an Exp(mean)-rate process before time 1;
// exactly Poisson(mean). O(mean) draws, which is fine at simulation scale.
inline uint64_t sample_poisson(double mean, Rng& rng) {
  uint64_t count = 0;
  double position = rng.next_exp(mean);
  while (position < 1.0) {
    ++count;
    position += rng.next_exp(mean);
  }
  return count;
}

}  // namespace geomatch
