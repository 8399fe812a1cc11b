#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace nugap::lti {

using Complex = std::complex<double>;

/// Real polynomial in s, coefficients stored in descending powers.
///
/// The leading coefficient is nonzero unless the polynomial is identically
/// zero, in which case the coefficient vector is empty and degree() is -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial constant(double c);
  /// Real polynomial leading * prod(s - r). The root set must be closed under
  /// conjugation; imaginary residue of the expansion is discarded.
  static Polynomial from_roots(std::span<const Complex> roots, double leading = 1.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.front(); }
  /// Coefficient of s^power (0 outside the stored range).
  double coeff(int power) const;

  Complex operator()(Complex s) const;
  double operator()(double s) const;

  /// p(-s).
  Polynomial mirrored() const;
  Polynomial derivative() const;
  /// Largest absolute coefficient.
  double max_abs() const;
  /// Drops leading coefficients with |c| <= rel_tol * max_abs().
  Polynomial trimmed(double rel_tol) const;

  /// Quotient and remainder of polynomial long division.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& p);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

 private:
  std::vector<double> coeffs_;
};

/// All deg(p) roots via eigenvalues of the balanced companion matrix, polished
/// by Newton steps, with conjugate pairs made exact. Sorted by real part, then
/// imaginary part. Throws std::domain_error("degenerate polynomial") for the
/// zero polynomial.
std::vector<Complex> poly_roots(const Polynomial& p);

/// Groups roots lying within rel_tol * max(1, |r|) of each other and replaces
/// each group by its centroid. A multiple root comes back from the eigenvalue
/// solver as a small star of simple roots whose centroid is far more accurate
/// than any single member.
std::vector<Complex> merge_root_clusters(std::vector<Complex> roots, double rel_tol);

}  // namespace nugap::lti
