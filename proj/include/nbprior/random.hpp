#pragma once

#include <cstdint>
#include <random>

namespace nbprior {

/// Seeded generator used for every random draw in the project.
///
/// The engine is std::mt19937_64 seeded with a single 64-bit value, whose
/// output sequence is fixed by the C++ standard. The standard distributions
/// are implementation-defined, so bounded integers and unit doubles are
/// derived here from raw engine output:
///   below(n):  draw r; reject while r < (2^64 - n) mod n; return r mod n
///   uniform(): (r >> 11) * 2^-53
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
};

}  // namespace nbprior
