#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dtn {

// Derives a substream seed from a master seed and a text label (FNV-1a over
// the label, then a splitmix64 finalizer). Labeled derivation keeps streams
// stable when experiments add schemes or grid points: each (label) pair maps
// to the same substream regardless of what else runs.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

// Deterministic random stream: a mt19937_64 engine with hand-rolled
// samplers. The standard specifies the engine's output exactly, and none of
// the library's samplers go through std:: distributions, so identical seeds
// give identical draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, std::string_view label)
      : engine_(derive_seed(master, label)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Lemire multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n);

  // Poisson count with the given mean. Knuth's product method, splitting
  // large means into exact independent chunks so the product never
  // underflows.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t poisson_small(double mean);

  std::mt19937_64 engine_;
};

}  // namespace dtn
