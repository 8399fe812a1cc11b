#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nugap {

/// Deterministic random stream. Draws are built from raw 64-bit engine
/// output so sequences agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a named purpose, derived from a root seed.
  static Rng substream(std::uint64_t root, std::string_view label) { return Rng(derive_seed(root, label)); }
  static std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Log-uniform in [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nugap
