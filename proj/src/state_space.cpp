#include "nugap/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace nugap::lti {

namespace {

constexpr int kKroneckerMaxOrder = 20;

Polynomial charpoly(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return Polynomial::constant(1.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<Complex> roots(ev.data(), ev.data() + ev.size());
  return Polynomial::from_roots(roots);
}

bool is_hurwitz(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return true;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff() < 0.0;
}

Polynomial lcm_denominator(std::span<const RationalTF> row) {
  const Polynomial& first = row.front().den();
  const bool all_equal = std::all_of(row.begin(), row.end(), [&](const RationalTF& g) { return g.den() == first; });
  if (all_equal) return first;

  std::vector<Complex> acc;
  for (const RationalTF& g : row) {
    if (g.den().degree() < 1) continue;
    const auto roots = merge_root_clusters(poly_roots(g.den()), 3e-5);
    std::vector<bool> used(acc.size(), false);
    std::vector<Complex> fresh;
    for (const Complex& r : roots) {
      bool matched = false;
      for (std::size_t j = 0; j < acc.size(); ++j) {
        if (!used[j] && std::abs(acc[j] - r) <= kCancelTol * std::max(1.0, std::abs(r))) {
          used[j] = true;
          matched = true;
          break;
        }
      }
      if (!matched) fresh.push_back(r);
    }
    acc.insert(acc.end(), fresh.begin(), fresh.end());
  }
  return Polynomial::from_roots(acc);
}

Complex realization_value(const StateSpace& sys, int input, Complex s) {
  const int n = sys.order();
  Complex direct = sys.D(0, input);
  if (n == 0) return direct;
  Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<Complex>();
  Eigen::VectorXcd x = M.partialPivLu().solve(sys.B.col(input).cast<Complex>());
  return (sys.C.cast<Complex>() * x)(0, 0) + direct;
}

}  // namespace

StateSpace realize_row(std::span<const Polynomial> numerators, const Polynomial& den) {
  if (den.is_zero()) throw std::invalid_argument("zero denominator");
  const int n = den.degree();
  const int k = static_cast<int>(numerators.size());
  const double lead = den.leading();
  const Polynomial a = (1.0 / lead) * den;

  StateSpace sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.B = Eigen::MatrixXd::Zero(n, k);
  sys.C = Eigen::MatrixXd::Zero(1, n);
  sys.D = Eigen::MatrixXd::Zero(1, k);
  for (int i = 0; i < n; ++i) {
    sys.A(i, 0) = -a.coeff(n - 1 - i);
    if (i + 1 < n) sys.A(i, i + 1) = 1.0;
  }
  if (n > 0) sys.C(0, 0) = 1.0;

  for (int col = 0; col < k; ++col) {
    const Polynomial b = (1.0 / lead) * numerators[static_cast<std::size_t>(col)];
    if (b.degree() > n) throw std::invalid_argument("improper system");
    const double direct = b.coeff(n);
    sys.D(0, col) = direct;
    const Polynomial rem = b - direct * a;
    for (int i = 0; i < n; ++i) sys.B(i, col) = rem.coeff(n - 1 - i);
  }
  return sys;
}

StateSpace tf_to_ss(std::span<const RationalTF> row) {
  if (row.empty()) throw std::invalid_argument("empty transfer-function row");
  const Polynomial den = lcm_denominator(row);
  std::vector<Polynomial> nums;
  nums.reserve(row.size());
  for (const RationalTF& g : row) {
    const Polynomial cofactor = den.divmod(g.den()).first;
    nums.push_back(g.num() * cofactor);
  }
  StateSpace sys = realize_row(nums, den);

  const Complex probes[] = {{0.0, 0.1}, {0.0, 1.0}, {0.0, 10.0}, {1.0, 1.0}};
  for (int col = 0; col < static_cast<int>(row.size()); ++col) {
    for (const Complex& s : probes) {
      const ExtendedComplex want = row[static_cast<std::size_t>(col)](s);
      if (want.infinite) continue;
      const Complex got = realization_value(sys, col, s);
      if (std::abs(got - want.value) > 1e-8 * (1.0 + std::abs(want.value))) {
        throw std::logic_error("realization round-trip mismatch");
      }
    }
  }
  return sys;
}

RationalTF ss_to_tf(const StateSpace& sys, int input) {
  const double direct = sys.D(0, input);
  if (sys.order() == 0) return RationalTF::gain(direct);
  const Polynomial open = charpoly(sys.A);
  const Polynomial shifted = charpoly(sys.A - sys.B.col(input) * sys.C);
  // det(sI - A + B C) = det(sI - A) (1 + C (sI - A)^-1 B)
  const Polynomial num = (shifted - open) + direct * open;
  return RationalTF(num, open);
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q, LyapunovMethod method) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  }
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (!is_hurwitz(A)) throw std::domain_error("unstable Lyapunov");

  if (method == LyapunovMethod::automatic) {
    method = n <= kKroneckerMaxOrder ? LyapunovMethod::kronecker : LyapunovMethod::schur;
  }

  Eigen::MatrixXd P;
  if (method == LyapunovMethod::kronecker) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    // vec(A P + P A^T) = (I (x) A + A (x) I) vec(P), column-major vec.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        K.block(i * n, j * n, n, n) += I(i, j) * A + A(i, j) * I;
      }
    }
    Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
    Eigen::VectorXd x = K.fullPivLu().solve(rhs);
    P = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  } else {
    // Bartels-Stewart on the complex Schur form A = U T U^*.
    Eigen::ComplexSchur<Eigen::MatrixXd> schur(A);
    const Eigen::MatrixXcd& U = schur.matrixU();
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd F = -(U.adjoint() * Q.cast<Complex>() * U);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      Eigen::VectorXcd rhs = F.col(j);
      for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * X.col(k);
      Eigen::MatrixXcd lhs = T;
      lhs.diagonal().array() += std::conj(T(j, j));
      X.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
    }
    P = (U * X * U.adjoint()).real();
  }
  return 0.5 * (P + P.transpose());
}

double hankel_norm(const StateSpace& sys) {
  if (sys.order() == 0) return 0.0;
  const Eigen::MatrixXd P = lyapunov_solve(sys.A, sys.B * sys.B.transpose());
  const Eigen::MatrixXd Q = lyapunov_solve(sys.A.transpose(), sys.C.transpose() * sys.C);
  Eigen::EigenSolver<Eigen::MatrixXd> es(P * Q, false);
  const double lmax = es.eigenvalues().real().maxCoeff();
  return std::sqrt(std::max(0.0, lmax));
}

StepResponse step_response(const StateSpace& sys, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("step_response: dt and t_end must be positive");
  const int n = sys.order();
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  StepResponse out;
  out.t.reserve(steps + 1);
  out.y.reserve(steps + 1);
  const double direct = sys.D(0, 0);

  Eigen::MatrixXd Ad, Bd;
  if (n > 0) {
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = sys.A * dt;
    aug.topRightCorner(n, 1) = sys.B.col(0) * dt;
    const Eigen::MatrixXd phi = aug.exp();
    Ad = phi.topLeftCorner(n, n);
    Bd = phi.topRightCorner(n, 1);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    out.t.push_back(static_cast<double>(k) * dt);
    out.y.push_back(n > 0 ? (sys.C * x)(0, 0) + direct : direct);
    if (n > 0) x = Ad * x + Bd;
  }
  return out;
}

}  // namespace nugap::lti
