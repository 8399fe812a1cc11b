#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace nugap::lti {

inline constexpr double kInfFrequency = std::numeric_limits<double>::infinity();

/// Strictly increasing positive frequencies (rad/s). Sup searches also probe
/// the limits omega = 0 and omega = +inf, which are not stored here.
struct FrequencyGrid {
  std::vector<double> omegas;

  static FrequencyGrid log_spaced(double omega_min, double omega_max, int points);
  static const FrequencyGrid& default_grid();

  double min() const { return omegas.front(); }
  double max() const { return omegas.back(); }
};

/// Outcome of a supremum search over the imaginary axis.
struct SupResult {
  double value = 0.0;
  /// Maximizing frequency; 0 or +inf when a limit probe wins.
  double omega = 0.0;
  /// Best value on the stored grid before refinement.
  double grid_max = 0.0;
  /// Grid indices bracketing the refined maximizer (-1 for limit probes).
  int bracket_lo = -1;
  int bracket_hi = -1;
};

/// sup over omega in {0} U grid U {inf} of f, refined by golden-section search
/// (in log omega) around the best local maxima of the grid samples.
/// `f` must accept omega = 0 and omega = +inf. Throws
/// std::domain_error("unbounded on axis") when f is not finite somewhere.
SupResult hinf_norm(const std::function<double(double)>& f, const FrequencyGrid& grid,
                    double rel_width = 1e-6);

}  // namespace nugap::lti
