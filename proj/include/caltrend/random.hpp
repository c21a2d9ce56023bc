#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace caltrend {

// Seeded generator with distribution helpers written out explicitly, so
// sequences are identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; no cached second variate so the stream stays simple.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Index drawn proportionally to non-negative weights.
  template <typename Range>
  std::size_t categorical(const Range& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    std::size_t i = 0;
    std::size_t last_positive = 0;
    for (double w : weights) {
      if (w > 0.0) {
        last_positive = i;
        if (u < w) return i;
      }
      u -= w;
      ++i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace caltrend
