#pragma once

#include <cstdint>

namespace backcom {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of an independent sub-stream, a pure function of (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Counter-based generator: the k-th output is mix64(key + k * golden gamma), so every stream
/// is reproducible bit-for-bit on any platform. The sampling transforms live in this file too.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed)) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Exponential with unit mean.
  double exponential();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace backcom
