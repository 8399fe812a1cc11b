#include "nugap/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nugap/coprime.hpp"
#include "nugap/metric.hpp"

namespace nugap::control {

namespace {

using Eigen::MatrixXd;

double riccati_residual(const MatrixXd& A, const MatrixXd& G, const MatrixXd& Q, const MatrixXd& X) {
  return (A.transpose() * X + X * A - X * G * X + Q).norm();
}

bool hurwitz(const MatrixXd& A) {
  if (A.rows() == 0) return true;
  const Eigen::VectorXcd ev = A.eigenvalues();
  return std::all_of(ev.begin(), ev.end(), [](const lti::Complex& z) { return z.real() < 0.0; });
}

MatrixXd matrix_sign(MatrixXd W) {
  const auto n = static_cast<double>(W.rows());
  for (int it = 0; it < 200; ++it) {
    const Eigen::PartialPivLU<MatrixXd> lu(W);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < W.rows(); ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
    if (!std::isfinite(logdet)) throw std::runtime_error("Riccati solve failed");
    // determinant scaling speeds up the early Newton steps
    const double c = std::exp(logdet / n);
    const MatrixXd next = 0.5 * (W / c + c * lu.inverse());
    const double change = (next - W).norm();
    W = next;
    if (change <= 1e-13 * W.norm()) break;
  }
  return W;
}

// Four functions of s for the loop: dk dg, nk ng, and the "magnitude" parts.
struct LoopPolys {
  lti::Polynomial ng, dg, nk, dk, chi;
};

LoopPolys loop_polys(const RationalTF& g, const RationalTF& gc, FeedbackConvention conv) {
  LoopPolys p{g.num(), g.den(), gc.num(), gc.den(), {}};
  const lti::Polynomial dd = p.dg * p.dk;
  const lti::Polynomial nn = p.ng * p.nk;
  p.chi = conv == FeedbackConvention::positive ? dd - nn : dd + nn;
  if (p.chi.is_zero() || p.chi.degree() < dd.degree() ||
      std::abs(p.chi.leading()) <= 1e-12 * std::abs(dd.leading())) {
    throw std::invalid_argument("ill-posed loop");
  }
  return p;
}

}  // namespace

const char* to_string(FeedbackConvention c) { return c == FeedbackConvention::positive ? "positive" : "negative"; }

MatrixXd care(const MatrixXd& A, const MatrixXd& G, const MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  if (n == 0) return MatrixXd(0, 0);
  MatrixXd H(2 * n, 2 * n);
  H << A, -G, -Q, -A.transpose();
  const MatrixXd W = matrix_sign(H);
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd lhs(2 * n, n), rhs(2 * n, n);
  lhs << W.topRightCorner(n, n), W.bottomRightCorner(n, n) + I;
  rhs << W.topLeftCorner(n, n) + I, W.bottomLeftCorner(n, n);
  MatrixXd X = lhs.colPivHouseholderQr().solve(-rhs);
  X = 0.5 * (X + X.transpose());
  if (!X.allFinite()) throw std::runtime_error("Riccati solve failed");

  double res = riccati_residual(A, G, Q, X);
  for (int it = 0; it < 3; ++it) {
    const MatrixXd Ak = A - G * X;
    if (!hurwitz(Ak)) break;
    const MatrixXd R = A.transpose() * X + X * A - X * G * X + Q;
    MatrixXd N;
    try {
      N = lti::lyapunov_solve(Ak.transpose(), R);
    } catch (const std::exception&) {
      break;
    }
    MatrixXd Xn = X + N;
    Xn = 0.5 * (Xn + Xn.transpose());
    const double rn = riccati_residual(A, G, Q, Xn);
    if (!(rn < res)) break;
    X = Xn;
    res = rn;
  }
  const double scale = 1.0 + A.norm() * X.norm() + Q.norm() + X.norm() * X.norm() * G.norm();
  if (!hurwitz(A - G * X) || res > 1e-6 * scale) throw std::runtime_error("Riccati solve failed");
  return X;
}

NcfRiccati ncf_riccati(const lti::StateSpace& sys) {
  NcfRiccati out;
  if (sys.order() == 0) {
    out.X = out.Z = MatrixXd(0, 0);
    return out;
  }
  const double D = sys.D(0, 0);
  const double S = 1.0 + D * D;  // 1 + D^T D and 1 + D D^T coincide for SISO
  const MatrixXd B = sys.B.leftCols(1);
  const MatrixXd Abar = sys.A - B * (D / S) * sys.C;
  out.X = care(Abar, B * B.transpose() / S, sys.C.transpose() * sys.C / S);
  out.Z = care(Abar.transpose(), sys.C.transpose() * sys.C / S, B * B.transpose() / S);
  const Eigen::VectorXcd ev = (out.X * out.Z).eigenvalues();
  double lmax = 0.0;
  for (const auto& z : ev) lmax = std::max(lmax, z.real());
  out.b_max = 1.0 / std::sqrt(1.0 + lmax);
  return out;
}

double b_max_riccati(const RationalTF& g) {
  const RationalTF row[] = {g};
  return ncf_riccati(lti::tf_to_ss(row)).b_max;
}

RationalTF ncf_controller(const RationalTF& g, double gamma_rel, FeedbackConvention conv) {
  if (!(gamma_rel >= 1.0)) throw std::invalid_argument("gamma_rel must be >= 1");
  const RationalTF row[] = {g};
  const lti::StateSpace sys = lti::tf_to_ss(row);
  const double D = sys.D(0, 0);
  RationalTF gc;
  double bmax = 1.0;
  if (sys.order() == 0) {
    gc = RationalTF::gain(-D);
  } else {
    const NcfRiccati ric = ncf_riccati(sys);
    bmax = ric.b_max;
    const double gamma = gamma_rel / bmax;
    const double g2 = gamma * gamma;
    const double S = 1.0 + D * D;
    const MatrixXd B = sys.B.leftCols(1);
    const MatrixXd& C = sys.C;
    const Eigen::Index n = sys.A.rows();
    const MatrixXd F = -(D * C + B.transpose() * ric.X) / S;
    const MatrixXd L = (1.0 - g2) * MatrixXd::Identity(n, n) + ric.X * ric.Z;
    const MatrixXd gain = g2 * L.transpose().fullPivLu().solve(ric.Z * C.transpose());
    lti::StateSpace k;
    k.A = sys.A + B * F + gain * (C + D * F);
    k.B = gain;
    k.C = B.transpose() * ric.X;
    k.D = MatrixXd::Constant(1, 1, -D);
    gc = lti::ss_to_tf(k);
  }
  if (conv == FeedbackConvention::negative) gc = -gc;
  const double b = stability_margin(g, gc, conv);
  if (b < bmax / gamma_rel - 1e-3) throw std::runtime_error("synthesis defect");
  return gc;
}

lti::Polynomial characteristic_polynomial(const RationalTF& g, const RationalTF& gc, FeedbackConvention conv) {
  return loop_polys(g, gc, conv).chi;
}

bool internal_stability(const RationalTF& g, const RationalTF& gc, FeedbackConvention conv, double eps) {
  const lti::Polynomial chi = characteristic_polynomial(g, gc, conv);
  if (chi.degree() == 0) return true;
  const auto roots = lti::poly_roots(chi);
  return std::all_of(roots.begin(), roots.end(), [eps](const lti::Complex& r) { return r.real() < -eps; });
}

double stability_margin(const RationalTF& g, const RationalTF& gc, FeedbackConvention conv,
                        const FrequencyGrid& grid) {
  if (!internal_stability(g, gc, conv)) return 0.0;
  const LoopPolys p = loop_polys(g, gc, conv);
  const int kdeg = p.dk.degree();
  const int gdeg = p.dg.degree();
  // The gang matrix is rank one: sigma = |(1, Gc)| |(1, G)| / |1 -+ Gc G|.
  const auto sigma = [&](double w) {
    if (std::isinf(w)) {
      const double a = std::hypot(p.dk.coeff(kdeg), p.nk.coeff(kdeg));
      const double b = std::hypot(p.dg.coeff(gdeg), p.ng.coeff(gdeg));
      return a * b / std::abs(p.chi.coeff(kdeg + gdeg));
    }
    const lti::Complex s{0.0, w};
    const double a = std::hypot(std::abs(p.dk(s)), std::abs(p.nk(s)));
    const double b = std::hypot(std::abs(p.dg(s)), std::abs(p.ng(s)));
    return a * b / std::abs(p.chi(s));
  };
  const auto sup = lti::hinf_norm(sigma, grid);
  return 1.0 / sup.value;
}

RationalTF closed_loop(const RationalTF& g, const RationalTF& gc, FeedbackConvention conv) {
  const LoopPolys p = loop_polys(g, gc, conv);
  // L = -+ G Gc, T = L / (1 + L) = -+ ng nk / chi
  const lti::Polynomial nn = p.ng * p.nk;
  return RationalTF(conv == FeedbackConvention::positive ? -nn : nn, p.chi);
}

std::vector<MemberReport> verify_cluster(const RationalTF& gc, const RationalTF& g_proto,
                                         const std::vector<RationalTF>& members,
                                         const std::vector<std::string>& ids, double b_achieved,
                                         FeedbackConvention conv, const FrequencyGrid& grid) {
  std::vector<MemberReport> out;
  out.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    MemberReport r;
    r.id = i < ids.size() ? ids[i] : "G" + std::to_string(i);
    r.nu_gap = metric::nu_gap(g_proto, members[i], grid);
    r.margin_ok = r.nu_gap < b_achieved;
    try {
      r.internally_stable = internal_stability(members[i], gc, conv);
    } catch (const std::invalid_argument&) {
      r.internally_stable = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

ControllerResult synthesize(const RationalTF& g, double gamma_rel, FeedbackConvention conv,
                            const FrequencyGrid& grid) {
  ControllerResult res;
  res.gamma_rel = gamma_rel;
  res.convention = conv;
  res.Gc = ncf_controller(g, gamma_rel, conv);
  res.b_achieved = stability_margin(g, res.Gc, conv, grid);
  res.b_max_plant = coprime::b_max(g);
  return res;
}

}  // namespace nugap::control
