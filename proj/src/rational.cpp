#include "nugap/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nugap::lti {

namespace {

// Star radius of a triple root is ~eps^(1/3); this collapses such stars
// before matching numerator against denominator roots.
constexpr double kMultiplicityMergeTol = 3e-5;

// Common roots of num and den, conjugate-closed, as averaged locations.
std::vector<Complex> common_roots(const Polynomial& num, const Polynomial& den, double tol) {
  if (num.degree() < 1 || den.degree() < 1) return {};
  const auto zeros = merge_root_clusters(poly_roots(num), kMultiplicityMergeTol);
  const auto poles = merge_root_clusters(poly_roots(den), kMultiplicityMergeTol);
  std::vector<bool> pole_used(poles.size(), false);
  std::vector<Complex> common;

  auto take = [&](const Complex& z) -> std::size_t {
    std::size_t best = poles.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (pole_used[j]) continue;
      const double dist = std::abs(z - poles[j]);
      if (dist <= tol * std::max(1.0, std::abs(poles[j])) && (best == poles.size() || dist < best_dist)) {
        best = j;
        best_dist = dist;
      }
    }
    if (best != poles.size()) pole_used[best] = true;
    return best;
  };

  for (const Complex& z : zeros) {
    if (z.imag() < 0.0) continue;
    const std::size_t j = take(z);
    if (j == poles.size()) continue;
    if (z.imag() == 0.0) {
      common.emplace_back(0.5 * (z.real() + poles[j].real()), 0.0);
      continue;
    }
    const std::size_t jc = take(std::conj(z));
    if (jc == poles.size()) {
      pole_used[j] = false;
      continue;
    }
    const Complex avg = 0.5 * (z + poles[j]);
    common.push_back(avg);
    common.push_back(std::conj(avg));
  }
  return common;
}

}  // namespace

RationalTF::RationalTF() : num_(), den_(Polynomial::constant(1.0)) {}

RationalTF::RationalTF(const Polynomial& num, const Polynomial& den, double cancel_tol) {
  if (den.is_zero()) throw std::invalid_argument("zero denominator");
  if (num.degree() > den.degree()) throw std::invalid_argument("improper system");
  if (num.is_zero()) {
    den_ = Polynomial::constant(1.0);
    return;
  }
  Polynomial n = num;
  Polynomial d = den;
  const auto common = common_roots(n, d, cancel_tol);
  if (!common.empty()) {
    const Polynomial factor = Polynomial::from_roots(common);
    n = n.divmod(factor).first;
    d = d.divmod(factor).first;
  }
  const double lead = d.leading();
  num_ = (1.0 / lead) * n;
  den_ = (1.0 / lead) * d;
  // Exact monic leading coefficient.
  std::vector<double> c = den_.coeffs();
  c.front() = 1.0;
  den_ = Polynomial(std::move(c));
}

RationalTF RationalTF::gain(double k) { return RationalTF(Polynomial::constant(k), Polynomial::constant(1.0)); }

ExtendedComplex RationalTF::operator()(Complex s) const {
  const Complex d = den_(s);
  const Complex n = num_(s);
  if (d == Complex{0.0}) {
    if (n == Complex{0.0}) return ExtendedComplex::finite(Complex{0.0});
    return ExtendedComplex::infinity();
  }
  return ExtendedComplex::finite(n / d);
}

ExtendedComplex RationalTF::freq(double omega) const {
  if (std::isinf(omega)) return ExtendedComplex::finite(Complex{at_infinity()});
  return (*this)(Complex{0.0, omega});
}

double RationalTF::at_infinity() const {
  if (num_.degree() < den_.degree()) return 0.0;
  return num_.leading() / den_.leading();
}

std::vector<Complex> RationalTF::poles() const {
  if (den_.degree() < 1) return {};
  return poly_roots(den_);
}

std::vector<Complex> RationalTF::zeros() const {
  if (num_.degree() < 1) return {};
  return poly_roots(num_);
}

Stability RationalTF::stability(double eps) const { return classify_roots(poles(), eps); }

Stability classify_roots(const std::vector<Complex>& roots, double eps) {
  Stability s = Stability::stable;
  for (const Complex& r : roots) {
    if (r.real() > eps) return Stability::unstable;
    if (r.real() >= -eps) s = Stability::marginal;
  }
  return s;
}

RationalTF tf_make(std::vector<double> num, std::vector<double> den, double cancel_tol) {
  return RationalTF(Polynomial(std::move(num)), Polynomial(std::move(den)), cancel_tol);
}

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
  return RationalTF(a.num() * b.num(), a.den() * b.den());
}

RationalTF operator+(const RationalTF& a, const RationalTF& b) {
  return RationalTF(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
}

RationalTF operator-(const RationalTF& a) { return RationalTF(-a.num(), a.den()); }

double coefficient_distance(const RationalTF& a, const RationalTF& b) {
  auto dist = [](const Polynomial& p, const Polynomial& q) {
    if (p.degree() != q.degree()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) m = std::max(m, std::abs(p.coeffs()[i] - q.coeffs()[i]));
    return m;
  };
  return std::max(dist(a.num(), b.num()), dist(a.den(), b.den()));
}

}  // namespace nugap::lti
