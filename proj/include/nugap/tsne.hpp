#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nugap/metric.hpp"

namespace nugap::embed {

/// Conditional neighbour probabilities p(j|i) = exp(-d_ij^2) / sum_{k!=i}
/// exp(-d_ik^2), zero diagonal. Rows sum to 1; the matrix is not symmetrized.
Eigen::MatrixXd affinities(const metric::DistanceMatrix& D);

/// Row-normalized Student-t similarities of the points in Z (n x 2).
Eigen::MatrixXd similarities(const Eigen::MatrixXd& Z);

/// sum_{i != j} p_ij log(p_ij / q_ij), zero-probability terms skipped.
double kl_cost(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Z);

/// Gradient of kl_cost with respect to Z:
/// 2 sum_j (p_ij + p_ji - q_ij - q_ji) (1 + |z_i - z_j|^2)^-1 (z_i - z_j).
Eigen::MatrixXd kl_gradient(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Z);

struct TsneConfig {
  std::uint64_t seed = 0;
  int iterations = 1000;
  double learning_rate = 10.0;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch = 250;
  double init_std = 1e-2;
};

struct EmbeddingResult {
  Eigen::MatrixXd coords;  // n x 2, best iterate
  /// Cost of the initial configuration followed by one entry per iteration.
  std::vector<double> kl_trace;
  std::uint64_t seed = 0;
  int iterations = 0;
  int best_iteration = 0;
};

/// Momentum gradient descent on kl_cost from a seeded isotropic Gaussian
/// start. Requires n >= 3.
EmbeddingResult tsne(const metric::DistanceMatrix& D, const TsneConfig& cfg = {});

}  // namespace nugap::embed
