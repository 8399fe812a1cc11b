#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nugap/rational.hpp"

namespace nugap::lti {

/// Continuous-time realization with a single output and k inputs.
struct StateSpace {
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x k
  Eigen::MatrixXd C;  // 1 x n
  Eigen::MatrixXd D;  // 1 x k

  int order() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(D.cols()); }
};

/// Observer-form realization of the row [num_1/den, ..., num_k/den] over a
/// shared denominator. Every numerator must have degree <= deg den.
StateSpace realize_row(std::span<const Polynomial> numerators, const Polynomial& den);

/// Realizes a 1 x k row of proper transfer functions over the least common
/// denominator of its entries. The realization is checked against the
/// entries on a probe grid (1e-8 relative) before it is returned.
StateSpace tf_to_ss(std::span<const RationalTF> row);

/// Transfer function of input `input` of a realization.
RationalTF ss_to_tf(const StateSpace& sys, int input = 0);

enum class LyapunovMethod { automatic, kronecker, schur };

/// Solves A P + P A^T + Q = 0 for Hurwitz A. Throws
/// std::domain_error("unstable Lyapunov") otherwise.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q,
                               LyapunovMethod method = LyapunovMethod::automatic);

/// sqrt(lambda_max(P Q)) from the controllability and observability gramians.
/// D is ignored.
double hankel_norm(const StateSpace& sys);

struct StepResponse {
  std::vector<double> t;
  std::vector<double> y;
};

/// Unit step on input 0, simulated with the exact zero-order-hold
/// discretization of the realization.
StepResponse step_response(const StateSpace& sys, double t_end, double dt);

}  // namespace nugap::lti
