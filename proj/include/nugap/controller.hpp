#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nugap/frequency.hpp"
#include "nugap/rational.hpp"
#include "nugap/state_space.hpp"

namespace nugap::control {

using lti::FrequencyGrid;
using lti::RationalTF;

/// Sign of the feedback loop formed by a plant G and a controller Gc.
/// `positive` is u = Gc y, with closed loop (1 - Gc G)^-1 and margin
/// 1 / || [1; Gc] (1 - Gc G)^-1 [1, G] ||_inf. `negative` is u = -Gc y.
enum class FeedbackConvention { positive, negative };

const char* to_string(FeedbackConvention c);

/// Stabilizing solution of A^T X + X A - X G X + Q = 0 (G, Q symmetric
/// positive semidefinite) via the matrix sign function of the Hamiltonian,
/// refined by Newton steps. Throws std::runtime_error("Riccati solve failed").
Eigen::MatrixXd care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Q);

/// Control (X) and filter (Z) Riccati solutions of the normalized coprime
/// factorization of a realization, with b_max = (1 + lambda_max(X Z))^-1/2.
struct NcfRiccati {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  double b_max = 1.0;
};

NcfRiccati ncf_riccati(const lti::StateSpace& sys);

/// b_max of a plant through its Riccati pair (independent of the
/// Hankel-norm route in coprime).
double b_max_riccati(const RationalTF& g);

/// Central suboptimal normalized-coprime-factor controller at
/// gamma = gamma_rel / b_max(G), expressed in the given convention.
/// Throws std::runtime_error("synthesis defect") if the achieved margin
/// falls below b_max / gamma_rel - 1e-3.
RationalTF ncf_controller(const RationalTF& g, double gamma_rel,
                          FeedbackConvention conv = FeedbackConvention::positive);

/// dg dk - ng nk (positive) or dg dk + ng nk (negative). Throws
/// std::invalid_argument("ill-posed loop") when 1 -+ Gc(inf) G(inf) = 0.
lti::Polynomial characteristic_polynomial(const RationalTF& g, const RationalTF& gc,
                                          FeedbackConvention conv = FeedbackConvention::positive);

/// True when the characteristic polynomial has all roots with Re < -eps.
bool internal_stability(const RationalTF& g, const RationalTF& gc,
                        FeedbackConvention conv = FeedbackConvention::positive,
                        double eps = lti::kStabilityTol);

/// Generalized stability margin; 0 for internally unstable loops.
double stability_margin(const RationalTF& g, const RationalTF& gc,
                        FeedbackConvention conv = FeedbackConvention::positive,
                        const FrequencyGrid& grid = FrequencyGrid::default_grid());

/// Reference-to-output map of the loop closed around a plant input
/// reference: L / (1 + L) with L = -G Gc (positive) or L = G Gc (negative).
RationalTF closed_loop(const RationalTF& g, const RationalTF& gc,
                       FeedbackConvention conv = FeedbackConvention::positive);

struct MemberReport {
  std::string id;
  double nu_gap = 0.0;
  bool margin_ok = false;
  bool internally_stable = false;
};

/// Per member: distance to the prototype, margin_ok = (distance < b) and an
/// independent internal-stability check of (member, Gc).
std::vector<MemberReport> verify_cluster(const RationalTF& gc, const RationalTF& g_proto,
                                         const std::vector<RationalTF>& members,
                                         const std::vector<std::string>& ids, double b_achieved,
                                         FeedbackConvention conv = FeedbackConvention::positive,
                                         const FrequencyGrid& grid = FrequencyGrid::default_grid());

struct ControllerResult {
  RationalTF Gc;
  double b_achieved = 0.0;
  double b_max_plant = 0.0;
  double gamma_rel = 1.05;
  FeedbackConvention convention = FeedbackConvention::positive;
  std::vector<MemberReport> member_reports;
};

/// ncf_controller plus the achieved margin; member_reports left empty.
ControllerResult synthesize(const RationalTF& g, double gamma_rel = 1.05,
                            FeedbackConvention conv = FeedbackConvention::positive,
                            const FrequencyGrid& grid = FrequencyGrid::default_grid());

}  // namespace nugap::control
