#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ipld {

/// Seedable random stream with a portable output sequence.
///
/// Each named stream is seeded independently from (seed, name) through
/// SplitMix64, so the draws of one stream do not depend on how many values
/// other streams consumed. The engine is std::mt19937_64, whose sequence is
/// fixed by the standard; uniforms are built from the top 53 bits rather
/// than std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace ipld
