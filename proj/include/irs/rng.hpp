#pragma once

// Deterministic random streams shared by every module.
//
// Seeding scheme (stable across platforms and compilers):
//   - engine: std::mt19937_64 seeded with one 64-bit value
//   - uniform in [0,1): (engine() >> 11) * 2^-53
//   - CN(0,1): Box-Muller, r = sqrt(-ln(1 - u1)), angle = 2*pi*u2,
//     i.e. real and imaginary parts each have variance 1/2
//   - derived seeds: derive_seed(base, stream) = splitmix64(splitmix64(base) ^ stream)
//
// std::normal_distribution is not used because its algorithm is
// implementation-defined.

#include "irs/linalg.hpp"

#include <cstdint>
#include <random>

namespace irs {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Complex complex_normal();
  /// Uniform phase in [0, 2*pi).
  double phase() { return kTwoPi * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace irs
