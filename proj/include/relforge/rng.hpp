#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace relforge {

// Deterministic RNG helpers. std::mt19937_64 is fully specified by the
// standard, so the same seed gives the same stream on every platform.
// The std:: distributions and std::shuffle are *not* specified, so we
// derive uniforms ourselves.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n), n > 0. Masked rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t mask = ~std::uint64_t{0};
    std::uint64_t limit = n - 1;
    // Smallest all-ones mask covering limit.
    mask >>= (limit == 0) ? 63 : __builtin_clzll(limit);
    for (;;) {
      std::uint64_t v = engine_() & mask;
      if (v < n) return v;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double real(double lo, double hi) { return lo + (hi - lo) * real(); }

  // Derive an independent child stream (for per-item seeding).
  std::uint64_t fork_seed() { return engine_(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    // Fisher-Yates with our own uniform; deterministic everywhere.
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace relforge
