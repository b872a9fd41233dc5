#pragma once

#include <cstdint>
#include <cmath>

namespace coopnet {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64. Hand-rolled so streams stay
// reproducible independently of the standard library, and cheap enough for
// the event-level simulator on a single core.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t st = seed;
    for (auto& word : s_) word = splitmix64(st);
    s_[0] |= 1;  // never all-zero
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unit-mean exponential.
  double exponential() { return -std::log(uniform_pos()); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exact Poisson draw via unit-rate interarrival counting; O(mean) but the
  // means in this artifact stay in the low thousands.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    long count = -1;
    double acc = 0.0;
    do {
      acc += exponential();
      ++count;
    } while (acc <= mean);
    return count;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Independent substream for (master seed, experiment point, replicate lane).
inline RngStream derive_stream(std::uint64_t master, std::uint64_t point = 0,
                               std::uint64_t replicate = 0) {
  std::uint64_t st = master;
  std::uint64_t z = splitmix64(st);
  st = z ^ (point + 0x9E3779B97F4A7C15ull);
  z = splitmix64(st);
  st = z ^ (replicate + 0xD1B54A32D192ED03ull);
  return RngStream(splitmix64(st));
}

}  // namespace coopnet
