#pragma once

// Seeded system generators and oracles shared by the test binaries. The
// oracles evaluate polynomials with their own Horner loops and never call
// the library's frequency-domain code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nugap/random.hpp"
#include "nugap/rational.hpp"

namespace testing {

using cplx = std::complex<double>;
using nugap::Rng;
using nugap::lti::Polynomial;
using nugap::lti::RationalTF;

inline cplx horner(const std::vector<double>& c, cplx s) {
  cplx v = 0.0;
  for (double a : c) v = v * s + a;
  return v;
}

struct Value {
  cplx v;
  bool inf = false;
};

inline Value eval(const RationalTF& g, cplx s) {
  const cplx d = horner(g.den().coeffs(), s);
  const cplx n = g.num().is_zero() ? cplx{0.0} : horner(g.num().coeffs(), s);
  if (std::abs(d) == 0.0) return {0.0, true};
  return {n / d, false};
}

/// Chordal distance written out with explicit square roots.
inline double chordal(Value a, Value b) {
  if (a.inf && b.inf) return 0.0;
  if (a.inf) return 1.0 / std::sqrt(1.0 + std::norm(b.v));
  if (b.inf) return 1.0 / std::sqrt(1.0 + std::norm(a.v));
  return std::abs(a.v - b.v) / std::sqrt((1.0 + std::norm(a.v)) * (1.0 + std::norm(b.v)));
}

/// Pointwise chordal distance maximized over a dense log grid plus the
/// two limits.
inline double dense_kappa_sup(const RationalTF& g1, const RationalTF& g2, int points = 200000, double lo = 1e-5,
                              double hi = 1e5, double* argmax = nullptr) {
  double best = chordal(eval(g1, 0.0), eval(g2, 0.0));
  double arg = 0.0;
  const double big = 1e9;
  const double at_inf = chordal(eval(g1, cplx{0.0, big}), eval(g2, cplx{0.0, big}));
  if (at_inf > best) best = at_inf, arg = INFINITY;
  for (int i = 0; i < points; ++i) {
    const double w = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    const double k = chordal(eval(g1, cplx{0.0, w}), eval(g2, cplx{0.0, w}));
    if (k > best) best = k, arg = w;
  }
  if (argmax) *argmax = arg;
  return best;
}

/// Random proper system with poles in the given real-part band. With
/// `unstable` some poles are mirrored into the right half-plane; with
/// `integrator` one pole is placed at the origin.
inline RationalTF random_system(Rng& rng, int order, bool unstable, bool integrator = false) {
  std::vector<cplx> poles;
  while (static_cast<int>(poles.size()) < order) {
    const double re = -rng.log_uniform(0.1, 10.0);
    if (static_cast<int>(poles.size()) + 2 <= order && rng.uniform() < 0.4) {
      const double im = rng.log_uniform(0.2, 5.0);
      poles.push_back({re, im});
      poles.push_back({re, -im});
    } else {
      poles.push_back({re, 0.0});
    }
  }
  if (unstable) {
    poles[0] = -std::conj(poles[0]);
    if (poles[0].imag() != 0.0) poles[1] = std::conj(poles[0]);
  }
  if (integrator) poles.back() = 0.0;
  const int nz = static_cast<int>(rng.below(static_cast<std::uint64_t>(order + 1)));
  std::vector<cplx> zeros;
  for (int i = 0; i < nz; ++i) zeros.push_back({-rng.log_uniform(0.1, 10.0) * (rng.uniform() < 0.2 ? -1.0 : 1.0), 0.0});
  const double k = rng.log_uniform(0.2, 5.0) * (rng.uniform() < 0.2 ? -1.0 : 1.0);
  return RationalTF(Polynomial::from_roots(zeros, k), Polynomial::from_roots(poles));
}

/// Clockwise winding number of phi about the origin along the imaginary
/// axis closed by a large right semicircle, by accumulating unwrapped phase.
/// For a rational phi this is (zeros - poles) inside the right half-plane.
/// `boundary` is set when the phase jumps by more than pi/2 between samples
/// (the curve passes through the origin).
struct ContourVerdict {
  int wno = 0;
  bool boundary = false;
};

template <class Phi>
ContourVerdict contour_winding(const Phi& phi, double radius = 1e5, int samples = 100000) {
  std::vector<cplx> path;
  const int half = samples / 2;
  // imaginary axis from -jR to +jR, sinh spacing concentrates samples near 0
  const double a = std::asinh(radius);
  for (int i = -half; i <= half; ++i) path.push_back({0.0, std::sinh(a * i / half)});
  // right semicircle back to -jR
  for (int i = 1; i < half; ++i) {
    const double th = std::numbers::pi / 2 - std::numbers::pi * i / half;
    path.push_back(radius * cplx{std::cos(th), std::sin(th)});
  }
  path.push_back({0.0, -radius});
  ContourVerdict out;
  double total = 0.0;
  cplx prev = phi(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const cplx cur = phi(path[i]);
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0) {
      out.boundary = true;
      return out;
    }
    const double step = std::arg(cur / prev);
    if (std::abs(step) > std::numbers::pi / 2) out.boundary = true;
    total += step;
    prev = cur;
  }
  out.wno = static_cast<int>(std::lround(-total / (2.0 * std::numbers::pi)));
  // a zero at infinity shows up as a vanishing tail along the axis
  double peak = 0.0;
  for (const auto& s : path) peak = std::max(peak, std::abs(phi(s)));
  if (std::abs(phi(cplx{0.0, 1e9})) < 1e-6 * peak) out.boundary = true;
  return out;
}

}  // namespace testing
