#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ckm {

// SplitMix64 finalizer; the mixing function used for every derived seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Sub-seed for one (iteration, stage) pair of a run:
//   mix64(master ^ mix64(iteration ^ mix64(fnv1a(tag))))
std::uint64_t hash64(std::uint64_t master, std::uint64_t iteration, std::string_view tag) noexcept;

// Thin wrapper over mt19937_64 so every module draws numbers the same way.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ckm
