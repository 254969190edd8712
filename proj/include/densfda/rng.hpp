#pragma once

#include <cstdint>
#include <random>

namespace densfda {

/// mt19937_64 with portable uniform/normal draws.
///
/// Stream splitting: the child stream for index i of a run seeded with s is
/// seeded with splitmix64(s ^ splitmix64(i + 1)), so replication i draws the
/// same numbers no matter which thread runs it or in what order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed ^ splitmix64(index + 1));
  }

  // 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller, no cached second draw.
  double normal();

  std::uint64_t next() { return engine_(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace densfda
