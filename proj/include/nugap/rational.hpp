#pragma once

#include <complex>
#include <vector>

#include "nugap/polynomial.hpp"

namespace nugap::lti {

inline constexpr double kCancelTol = 1e-8;
inline constexpr double kStabilityTol = 1e-9;

/// A point of the extended complex plane (Riemann sphere).
struct ExtendedComplex {
  Complex value{};
  bool infinite = false;

  static ExtendedComplex finite(Complex v) { return {v, false}; }
  static ExtendedComplex infinity() { return {Complex{}, true}; }
};

enum class Stability { stable, marginal, unstable };

/// Proper real-rational SISO transfer function num/den.
///
/// Stored in canonical form: numerator and denominator share no root (up to
/// the cancellation tolerance), the denominator is monic and the zero
/// function is 0/1.
class RationalTF {
 public:
  /// The zero transfer function.
  RationalTF();
  /// Throws std::invalid_argument("improper system") if deg num > deg den and
  /// std::invalid_argument on a zero denominator.
  RationalTF(const Polynomial& num, const Polynomial& den, double cancel_tol = kCancelTol);

  static RationalTF gain(double k);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  int order() const { return den_.degree(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_strictly_proper() const { return num_.degree() < den_.degree(); }

  ExtendedComplex operator()(Complex s) const;
  /// Frequency response at s = j*omega; omega == +inf gives the limit value.
  ExtendedComplex freq(double omega) const;
  /// Value at s -> infinity (finite since the system is proper).
  double at_infinity() const;

  std::vector<Complex> poles() const;
  std::vector<Complex> zeros() const;
  Stability stability(double eps = kStabilityTol) const;
  bool is_stable(double eps = kStabilityTol) const { return stability(eps) == Stability::stable; }

  friend bool operator==(const RationalTF& a, const RationalTF& b) = default;

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Builds the canonical RationalTF from descending coefficient lists.
RationalTF tf_make(std::vector<double> num, std::vector<double> den,
                   double cancel_tol = kCancelTol);

/// Classifies a root set against the open left half-plane.
Stability classify_roots(const std::vector<Complex>& roots, double eps = kStabilityTol);

RationalTF operator*(const RationalTF& a, const RationalTF& b);
RationalTF operator+(const RationalTF& a, const RationalTF& b);
RationalTF operator-(const RationalTF& a);

/// Maximum absolute coefficient difference after canonicalization.
double coefficient_distance(const RationalTF& a, const RationalTF& b);

}  // namespace nugap::lti
