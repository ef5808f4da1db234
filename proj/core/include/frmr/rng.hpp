#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace frmr {

// Deterministic sampling on top of std::mt19937_64, whose output stream is
// pinned down by the standard. Uniform doubles take the top 53 bits of one
// draw and Gaussians go through Box-Muller, so every derived stream is
// bit-reproducible across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; draws two uniforms and caches the
  // second variate.
  double gaussian();

  // Uniform in [0, n); rejection sampling keeps it unbiased. n must be > 0.
  std::uint64_t index(std::uint64_t n);

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

  // k distinct values from {0, ..., n-1} (Floyd's algorithm), in the order
  // they were selected.
  std::vector<std::int64_t> distinct(std::int64_t n, std::int64_t k);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace frmr
