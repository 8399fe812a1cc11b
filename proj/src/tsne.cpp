#include "nugap/tsne.hpp"

#include <cmath>
#include <stdexcept>

#include "nugap/random.hpp"

namespace nugap::embed {

namespace {

constexpr double kDenomEps = 1e-12;

Eigen::MatrixXd kernel(const Eigen::MatrixXd& Z) {
  const Eigen::Index n = Z.rows();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      W(i, j) = W(j, i) = 1.0 / (1.0 + (Z.row(i) - Z.row(j)).squaredNorm());
    }
  }
  return W;
}

Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& W) {
  Eigen::MatrixXd Q = W;
  for (Eigen::Index i = 0; i < W.rows(); ++i) Q.row(i) /= W.row(i).sum() + kDenomEps;
  return Q;
}

}  // namespace

Eigen::MatrixXd affinities(const metric::DistanceMatrix& D) {
  const auto n = static_cast<Eigen::Index>(D.size());
  if (n < 2) throw std::invalid_argument("affinities need at least two points");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = D(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      P(i, j) = std::exp(-d * d);
    }
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

Eigen::MatrixXd similarities(const Eigen::MatrixXd& Z) { return row_normalize(kernel(Z)); }

double kl_cost(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Z) {
  const Eigen::MatrixXd Q = similarities(Z);
  double J = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (i == j || P(i, j) <= 0.0) continue;
      J += P(i, j) * std::log(P(i, j) / std::max(Q(i, j), 1e-300));
    }
  }
  return J;
}

Eigen::MatrixXd kl_gradient(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Z) {
  const Eigen::MatrixXd W = kernel(Z);
  const Eigen::MatrixXd Q = row_normalize(W);
  const Eigen::MatrixXd M = (P + P.transpose() - Q - Q.transpose()).cwiseProduct(W);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    for (Eigen::Index j = 0; j < Z.rows(); ++j) {
      if (i != j) G.row(i) += 2.0 * M(i, j) * (Z.row(i) - Z.row(j));
    }
  }
  return G;
}

EmbeddingResult tsne(const metric::DistanceMatrix& D, const TsneConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(D.size());
  if (n < 3) throw std::invalid_argument("tsne needs at least three points");
  const Eigen::MatrixXd P = affinities(D);

  Rng rng(cfg.seed);
  Eigen::MatrixXd Z(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < 2; ++k) Z(i, k) = cfg.init_std * rng.normal();
  }

  EmbeddingResult res;
  res.seed = cfg.seed;
  res.iterations = cfg.iterations;
  res.coords = Z;
  double best = kl_cost(P, Z);
  res.kl_trace.push_back(best);

  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(n, 2);
  for (int it = 1; it <= cfg.iterations; ++it) {
    const double momentum = it <= cfg.momentum_switch ? cfg.momentum_initial : cfg.momentum_final;
    step = momentum * step - cfg.learning_rate * kl_gradient(P, Z);
    Z += step;
    const double J = kl_cost(P, Z);
    res.kl_trace.push_back(J);
    if (J < best) {
      best = J;
      res.coords = Z;
      res.best_iteration = it;
    }
  }
  return res;
}

}  // namespace nugap::embed
