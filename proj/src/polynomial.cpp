#include "nugap/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

namespace nugap::lti {

namespace {

std::vector<double> strip_leading_zeros(std::vector<double> c) {
  auto first = std::find_if(c.begin(), c.end(), [](double x) { return x != 0.0; });
  c.erase(c.begin(), first);
  return c;
}

// Horner evaluation of p and p' together.
std::pair<Complex, Complex> eval_with_derivative(const std::vector<double>& c, Complex s) {
  Complex p{0.0}, dp{0.0};
  for (double a : c) {
    dp = dp * s + p;
    p = p * s + a;
  }
  return {p, dp};
}

// Sum of |c_k| |s|^k, the natural scale of a rounding-level residual.
double eval_scale(const std::vector<double>& c, double r) {
  double acc = 0.0;
  for (double a : c) acc = acc * r + std::abs(a);
  return acc;
}

bool root_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(strip_leading_zeros(std::move(coeffs))) {}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : Polynomial(std::vector<double>(coeffs)) {}

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::from_roots(std::span<const Complex> roots, double leading) {
  std::vector<Complex> acc{Complex{leading}};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, Complex{0.0});
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> c(acc.size());
  std::transform(acc.begin(), acc.end(), c.begin(), [](const Complex& z) { return z.real(); });
  return Polynomial(std::move(c));
}

double Polynomial::coeff(int power) const {
  const int idx = degree() - power;
  if (power < 0 || idx < 0) return 0.0;
  return coeffs_[static_cast<std::size_t>(idx)];
}

Complex Polynomial::operator()(Complex s) const {
  Complex acc{0.0};
  for (double a : coeffs_) acc = acc * s + a;
  return acc;
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (double a : coeffs_) acc = acc * s + a;
  return acc;
}

Polynomial Polynomial::mirrored() const {
  std::vector<double> c = coeffs_;
  const int n = degree();
  for (int i = 0; i <= n; ++i) {
    // coefficient index i multiplies s^(n-i)
    if ((n - i) % 2 == 1) c[static_cast<std::size_t>(i)] = -c[static_cast<std::size_t>(i)];
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::derivative() const {
  const int n = degree();
  if (n <= 0) return {};
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = coeffs_[static_cast<std::size_t>(i)] * (n - i);
  return Polynomial(std::move(c));
}

double Polynomial::max_abs() const {
  double m = 0.0;
  for (double a : coeffs_) m = std::max(m, std::abs(a));
  return m;
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const double cutoff = rel_tol * max_abs();
  std::vector<double> c = coeffs_;
  auto first = std::find_if(c.begin(), c.end(), [cutoff](double x) { return std::abs(x) > cutoff; });
  c.erase(c.begin(), first);
  return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
  const int n = degree();
  const int m = divisor.degree();
  if (n < m) return {Polynomial{}, *this};
  std::vector<double> rem = coeffs_;
  std::vector<double> quot(static_cast<std::size_t>(n - m + 1), 0.0);
  const double lead = divisor.leading();
  for (int i = 0; i <= n - m; ++i) {
    const double q = rem[static_cast<std::size_t>(i)] / lead;
    quot[static_cast<std::size_t>(i)] = q;
    for (int j = 0; j <= m; ++j) {
      rem[static_cast<std::size_t>(i + j)] -= q * divisor.coeffs_[static_cast<std::size_t>(j)];
    }
  }
  std::vector<double> r(rem.begin() + (n - m + 1), rem.end());
  return {Polynomial(std::move(quot)), Polynomial(std::move(r))};
}

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
  std::vector<double> c(n, 0.0);
  const std::size_t oa = n - a.coeffs_.size();
  const std::size_t ob = n - b.coeffs_.size();
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[oa + i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[ob + i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& p) {
  if (k == 0.0) return {};
  std::vector<double> c = p.coeffs_;
  for (double& x : c) x *= k;
  return Polynomial(std::move(c));
}

std::vector<Complex> poly_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::domain_error("degenerate polynomial");
  std::vector<double> c = p.coeffs();

  // Exact zero roots come off the tail first so integrators stay exact.
  std::vector<Complex> roots;
  while (c.size() > 1 && c.back() == 0.0) {
    roots.emplace_back(0.0, 0.0);
    c.pop_back();
  }
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) {
    roots.emplace_back(-c[1] / c[0], 0.0);
  } else if (n > 1) {
    Eigen::VectorXd ascending(n + 1);
    for (int i = 0; i <= n; ++i) ascending(i) = c[static_cast<std::size_t>(n - i)];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(ascending);
    const auto& eig = solver.roots();

    std::vector<Complex> found(eig.data(), eig.data() + eig.size());
    for (Complex& r : found) {
      // Newton polish, kept only while the residual strictly decreases.
      auto [pr, dpr] = eval_with_derivative(c, r);
      for (int it = 0; it < 3 && dpr != Complex{0.0}; ++it) {
        const Complex cand = r - pr / dpr;
        auto [pc, dpc] = eval_with_derivative(c, cand);
        if (!(std::abs(pc) < std::abs(pr))) break;
        r = cand;
        pr = pc;
        dpr = dpc;
      }
    }

    // Make conjugate pairs exact: snap near-real roots, then pair the rest.
    for (Complex& r : found) {
      const double scale = std::max(1.0, std::abs(r));
      if (std::abs(r.imag()) <= 1e-12 * scale) {
        r = {r.real(), 0.0};
      } else {
        // A root whose real-axis projection has a residual at rounding level
        // is real; the imaginary part is solver noise.
        const double re = r.real();
        const double res = std::abs(eval_with_derivative(c, Complex{re}).first);
        if (res <= 64.0 * std::numeric_limits<double>::epsilon() * eval_scale(c, std::abs(re)) &&
            std::abs(r.imag()) <= 1e-7 * scale) {
          r = {re, 0.0};
        }
      }
    }
    std::vector<bool> used(found.size(), false);
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (used[i] || found[i].imag() <= 0.0) continue;
      std::size_t best = found.size();
      double best_dist = 0.0;
      for (std::size_t j = 0; j < found.size(); ++j) {
        if (j == i || used[j] || found[j].imag() >= 0.0) continue;
        const double dist = std::abs(found[j] - std::conj(found[i]));
        if (best == found.size() || dist < best_dist) {
          best = j;
          best_dist = dist;
        }
      }
      if (best == found.size()) continue;
      const Complex avg = 0.5 * (found[i] + std::conj(found[best]));
      found[i] = avg;
      found[best] = std::conj(avg);
      used[i] = used[best] = true;
    }
    roots.insert(roots.end(), found.begin(), found.end());
  }
  std::sort(roots.begin(), roots.end(), root_less);
  return roots;
}

std::vector<Complex> merge_root_clusters(std::vector<Complex> roots, double rel_tol) {
  std::vector<Complex> out;
  std::vector<bool> taken(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (taken[i]) continue;
    std::vector<std::size_t> group{i};
    taken[i] = true;
    // Transitive closure so a star of k perturbed roots collapses together.
    for (std::size_t g = 0; g < group.size(); ++g) {
      const Complex ref = roots[group[g]];
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (taken[j]) continue;
        if (std::abs(roots[j] - ref) <= rel_tol * std::max(1.0, std::abs(ref))) {
          taken[j] = true;
          group.push_back(j);
        }
      }
    }
    Complex centroid{0.0};
    for (std::size_t g : group) centroid += roots[g];
    centroid /= static_cast<double>(group.size());
    for (std::size_t g = 0; g < group.size(); ++g) out.push_back(centroid);
  }
  std::sort(out.begin(), out.end(), root_less);
  return out;
}

}  // namespace nugap::lti
