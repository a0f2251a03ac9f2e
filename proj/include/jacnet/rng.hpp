#pragma once

#include <cstdint>
#include <random>

namespace jacnet {

/// mt19937_64 with a fixed bits-to-double mapping so streams are identical
/// across platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0, 1)

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace jacnet
