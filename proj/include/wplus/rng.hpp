#pragma once

#include <cstdint>
#include <random>

namespace wplus {

// Seeded stream with platform-independent output. std::normal_distribution is
// implementation-defined, so Gaussians come from Box-Muller over mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace wplus
