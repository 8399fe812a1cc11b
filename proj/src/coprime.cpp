#include "nugap/coprime.hpp"

#include <cmath>
#include <stdexcept>

namespace nugap::coprime {

namespace {

constexpr double kBoundaryTol = 1e-9;

}  // namespace

Polynomial spectral_factor(const Polynomial& n, const Polynomial& m) {
  if (m.is_zero()) throw std::invalid_argument("spectral_factor: m is identically zero");
  const Polynomial p = n.mirrored() * n + m.mirrored() * m;
  const int two_deg = p.degree();
  if (two_deg % 2 != 0) throw std::logic_error("spectral_factor: odd-degree para-Hermitian polynomial");
  const int deg = two_deg / 2;

  // p is even in s: p(s) = q(s^2). Factor q instead, halving the degree.
  std::vector<double> q(static_cast<std::size_t>(deg + 1));
  for (int k = 0; k <= deg; ++k) q[static_cast<std::size_t>(deg - k)] = p.coeff(2 * k);
  const Polynomial qp(q);
  const double lead = std::sqrt(std::abs(qp.leading()));
  if (deg == 0) return Polynomial::constant(lead);

  std::vector<Complex> roots;
  roots.reserve(static_cast<std::size_t>(deg));
  for (const Complex& x : lti::poly_roots(qp)) {
    const Complex s = -std::sqrt(x);
    if (std::abs(s.real()) <= kBoundaryTol * (1.0 + std::abs(s))) {
      throw std::domain_error("boundary spectral zero");
    }
    roots.push_back(s);
  }
  return Polynomial::from_roots(roots, lead);
}

GraphSymbols::GraphSymbols(const RationalTF& g)
    : n_(g.num()), m_(g.den()), d_(spectral_factor(g.num(), g.den())) {}

std::pair<Complex, Complex> GraphSymbols::image(Complex s) const {
  const Complex dv = d_(s);
  return {m_(s) / dv, n_(s) / dv};
}

std::pair<Complex, Complex> GraphSymbols::kernel(Complex s) const {
  const Complex dv = d_(s);
  return {-n_(s) / dv, m_(s) / dv};
}

lti::StateSpace GraphSymbols::kernel_realization() const {
  const Polynomial row[] = {-n_, m_};
  return lti::realize_row(row, d_);
}

GraphSymbols graph_symbols(const RationalTF& g) { return GraphSymbols(g); }

double b_max(const RationalTF& g) {
  const double h = lti::hankel_norm(graph_symbols(g).kernel_realization());
  return std::sqrt(std::max(0.0, 1.0 - h * h));
}

}  // namespace nugap::coprime
