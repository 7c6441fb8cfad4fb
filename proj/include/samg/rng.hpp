#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace samg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// mt19937_64 is fully specified by the standard, and the draw helpers below
// avoid the library-defined distribution adaptors, so streams are identical
// across platforms and toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // [0, 1) with 53 random mantissa bits
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int n) {
    if (n <= 1) return 0;
    int k = static_cast<int>(uniform01() * n);
    return k >= n ? n - 1 : k;
  }

  // Index drawn from a probability row. Never lands on a zero entry even when
  // the cumulative sum falls short of 1 by a few ulps.
  int categorical(const std::vector<double>& w) {
    int last = 0;
    for (int i = 0; i < static_cast<int>(w.size()); ++i) {
      if (w[i] > 0.0) last = i;
    }
    double u = uniform01();
    double acc = 0.0;
    for (int i = 0; i <= last; ++i) {
      acc += w[i];
      if (u < acc && w[i] > 0.0) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 gen_;
};

// Counter-based stream derivation: episode k of a run seeded with s always
// sees the same stream, no matter in which order or on which thread the
// episodes execute.
inline Rng episode_rng(std::uint64_t seed, std::uint64_t episode) {
  return Rng(splitmix64(seed) ^ splitmix64((episode + 1) * 0x9E3779B97F4A7C15ull));
}

}  // namespace samg
