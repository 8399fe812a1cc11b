#pragma once

#include <complex>

#include "nugap/rational.hpp"
#include "nugap/state_space.hpp"

namespace nugap::coprime {

using lti::Complex;
using lti::Polynomial;
using lti::RationalTF;

/// Hurwitz d with d(-s) d(s) = n(-s) n(s) + m(-s) m(s), positive leading
/// coefficient and degree max(deg n, deg m). Throws
/// std::domain_error("boundary spectral zero") when the right-hand side
/// vanishes on the imaginary axis.
Polynomial spectral_factor(const Polynomial& n, const Polynomial& m);

/// Normalized coprime factorization of a SISO plant G = n/m.
///
/// With d the spectral factor of (n, m), the right factors are M = m/d and
/// N = n/d, so that |M(jw)|^2 + |N(jw)|^2 = 1. Scalars commute, so the left
/// factors Mhat, Nhat equal M, N; a MIMO extension would have to compute
/// them separately. J = (M; N) is the normalized image representation and
/// K = (-N, M) the normalized kernel representation, K J = 0.
///
/// The factors are kept as raw polynomials over the shared d: M and N may
/// lose the common denominator after cancellation, and every evaluation
/// below goes through n, m, d directly.
class GraphSymbols {
 public:
  explicit GraphSymbols(const RationalTF& g);

  const Polynomial& n() const { return n_; }
  const Polynomial& m() const { return m_; }
  const Polynomial& d() const { return d_; }

  RationalTF M() const { return RationalTF(m_, d_); }
  RationalTF N() const { return RationalTF(n_, d_); }
  RationalTF Mhat() const { return M(); }
  RationalTF Nhat() const { return N(); }

  /// J(s) = (M(s), N(s)).
  std::pair<Complex, Complex> image(Complex s) const;
  /// K(s) = (-N(s), M(s)).
  std::pair<Complex, Complex> kernel(Complex s) const;
  /// 1 x 2 state-space realization of K over d.
  lti::StateSpace kernel_realization() const;

 private:
  Polynomial n_, m_, d_;
};

GraphSymbols graph_symbols(const RationalTF& g);

/// sqrt(1 - ||K||_H^2), the largest stability margin any controller can
/// achieve for g.
double b_max(const RationalTF& g);

}  // namespace nugap::coprime
