#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bnprune {

// Deterministic random source. All floating-point draws are constructed
// explicitly from raw 64-bit engine output (no std::*_distribution), so the
// stream is bit-stable for a given seed regardless of standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child stream derived from the original seed and a stream id.
  // fork(a) and fork(b) are decorrelated for a != b.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t next_u64();

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform();

  // Standard normal via Box-Muller, second draw of each pair cached.
  double normal();

  // Standard normal conditioned on [lo, hi] by rejection.
  double truncated_normal(double lo, double hi);

  void fill_normal(std::span<double> out);

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 step; used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bnprune
