#pragma once

#include <cstdint>
#include <random>

namespace moranipd {

// Finalizer step of the splitmix64 generator. Good avalanche, cheap, and
// stable across platforms, which is all we need for seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Child seed for a unit of work identified by up to three path components
// (repetition index, pair index, sample index, ...). The same (master, path)
// always yields the same child seed, so work items can be evaluated in any
// order -- or on any number of threads -- without changing results.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// Seeded random source. Wraps mt19937_64 but hand-rolls the draws on top of
// raw 64-bit outputs: the standard <random> distributions are
// implementation-defined, and identical streams across standard libraries are
// required for reproducible runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer in [0, n). Rejection over the top multiple of n.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 eng_;
};

}  // namespace moranipd
