#include "nugap/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nugap::lti {

namespace {

constexpr int kRefinedPeaks = 5;

double checked(double v) {
  if (!std::isfinite(v)) throw std::domain_error("unbounded on axis");
  return v;
}

// Golden-section maximization of f(exp(x)) on [lo, hi] in log-frequency.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double rel_width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = checked(f(std::exp(c)));
  double fd = checked(f(std::exp(d)));
  // log-width tolerance equals relative omega-width to first order
  while (b - a > rel_width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = checked(f(std::exp(c)));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = checked(f(std::exp(d)));
    }
  }
  return fc >= fd ? std::pair{std::exp(c), fc} : std::pair{std::exp(d), fd};
}

}  // namespace

FrequencyGrid FrequencyGrid::log_spaced(double omega_min, double omega_max, int points) {
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || points < 2) {
    throw std::invalid_argument("frequency grid needs 0 < min < max and >= 2 points");
  }
  FrequencyGrid g;
  g.omegas.resize(static_cast<std::size_t>(points));
  const double lmin = std::log10(omega_min);
  const double step = (std::log10(omega_max) - lmin) / (points - 1);
  for (int i = 0; i < points; ++i) g.omegas[static_cast<std::size_t>(i)] = std::pow(10.0, lmin + step * i);
  g.omegas.front() = omega_min;
  g.omegas.back() = omega_max;
  return g;
}

const FrequencyGrid& FrequencyGrid::default_grid() {
  static const FrequencyGrid grid = log_spaced(1e-4, 1e4, 600);
  return grid;
}

SupResult hinf_norm(const std::function<double(double)>& f, const FrequencyGrid& grid, double rel_width) {
  const auto& w = grid.omegas;
  const int n = static_cast<int>(w.size());
  std::vector<double> vals(w.size());
  for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = checked(f(w[static_cast<std::size_t>(i)]));

  SupResult res;
  const auto best_it = std::max_element(vals.begin(), vals.end());
  res.grid_max = *best_it;
  res.value = res.grid_max;
  res.omega = w[static_cast<std::size_t>(best_it - vals.begin())];
  res.bracket_lo = res.bracket_hi = static_cast<int>(best_it - vals.begin());

  // Local maxima of the samples, largest first.
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    const bool left = i == 0 || v >= vals[static_cast<std::size_t>(i - 1)];
    const bool right = i == n - 1 || v >= vals[static_cast<std::size_t>(i + 1)];
    if (left && right) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
  });
  if (peaks.size() > static_cast<std::size_t>(kRefinedPeaks)) peaks.resize(kRefinedPeaks);

  for (int i : peaks) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    if (lo == hi) continue;
    const auto [om, v] = golden_max(f, w[static_cast<std::size_t>(lo)], w[static_cast<std::size_t>(hi)], rel_width);
    if (v > res.value) {
      res.value = v;
      res.omega = om;
      res.bracket_lo = lo;
      res.bracket_hi = hi;
    }
  }

  const double at_zero = checked(f(0.0));
  if (at_zero > res.value) {
    res.value = at_zero;
    res.omega = 0.0;
    res.bracket_lo = res.bracket_hi = -1;
  }
  const double at_inf = checked(f(kInfFrequency));
  if (at_inf > res.value) {
    res.value = at_inf;
    res.omega = kInfFrequency;
    res.bracket_lo = res.bracket_hi = -1;
  }
  return res;
}

}  // namespace nugap::lti
