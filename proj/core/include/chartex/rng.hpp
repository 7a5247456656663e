#pragma once

#include <cstdint>
#include <string_view>

namespace chartex {

/// Derives an independent stream seed from (master seed, item index, stage
/// name). Every random decision in the pipeline draws from a generator seeded
/// this way, so toggling one stage never perturbs another stage's stream and
/// batch items are independent regardless of processing order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                          std::string_view stage);

/// xoshiro256++ with explicit distribution transforms. The standard
/// <random> distributions are implementation-defined, which would tie
/// artifact bytes to the standard library version; these transforms are
/// fixed here so the same seed reproduces the same dataset anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard Box-Muller normal; draws two uniforms per call.
  double normal(double mean = 0.0, double sigma = 1.0);
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace chartex
