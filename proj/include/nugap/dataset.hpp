#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nugap/rational.hpp"

namespace nugap::data {

enum class Family { first_order, second_order, integrator, unstable };

const char* to_string(Family f);

/// Relative weights of the plant families and the parameter ranges they
/// are drawn from. Gains, time constants and natural frequencies are drawn
/// log-uniformly, damping uniformly.
struct DatasetConfig {
  double weight_first_order = 0.3;
  double weight_second_order = 0.3;
  double weight_integrator = 0.2;
  double weight_unstable = 0.2;
  /// Probability of an extra left-half-plane zero (tz s + 1).
  double zero_probability = 0.25;

  double gain_min = 0.5, gain_max = 5.0;
  double tau_min = 0.2, tau_max = 5.0;
  double wn_min = 0.5, wn_max = 5.0;
  double zeta_min = 0.3, zeta_max = 1.0;
  double zero_tau_min = 0.1, zero_tau_max = 1.0;
  double unstable_tau_min = 1.0, unstable_tau_max = 10.0;
};

struct Dataset {
  std::vector<std::string> ids;
  std::vector<lti::RationalTF> systems;
  std::vector<Family> families;
};

/// n plants split over the families in proportion to their weights (every
/// family with positive weight gets at least one member once n allows it),
/// shuffled, with ids "G0", "G1", ... Deterministic in the seed.
Dataset generate_dataset(std::uint64_t seed, std::size_t n, const DatasetConfig& cfg = {});

}  // namespace nugap::data
