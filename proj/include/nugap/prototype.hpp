#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nugap/chebyshev.hpp"
#include "nugap/coprime.hpp"
#include "nugap/frequency.hpp"
#include "nugap/metric.hpp"
#include "nugap/rational.hpp"

namespace nugap::proto {

using lti::Complex;
using lti::FrequencyGrid;
using lti::RationalTF;

/// Requested value h of the new system at s = j*omega_c, and the pointwise
/// distance beta of h from the current system there.
struct InterpolationTarget {
  double omega_c = 1.0;
  ExtendedComplex h;
  double beta = 0.0;
};

InterpolationTarget make_target(const RationalTF& g, double omega_c, const ExtendedComplex& h);

/// Pieces of the stable interpolant Delta = Delta1 * Sigma * Delta2 * R * prod(F).
struct DeltaParts {
  Complex T{};
  Complex T1{1.0};
  Complex T2{1.0};
  double Sigma = 0.0;
  int D1 = 1;
  int D2 = -1;
  RationalTF Omega;
  double rho = 1.0;
  RationalTF Delta1 = RationalTF::gain(1.0);
  RationalTF rolloff = RationalTF::gain(1.0);
  RationalTF Delta;
  /// Pole reflections applied to Delta1; empty unless the first-order
  /// interpolant came out unstable.
  std::vector<RationalTF> blaschke_factors;
  int compensation_rounds = 0;
};

/// Sign choice for the real constant D of the first-order interpolant.
/// `standard` puts the interpolant pole in the left half-plane;
/// `inverted` is the opposite choice and exists to exercise the pole
/// reflection path.
enum class DSignRule { standard, inverted };

/// T = [K1(jw) v] [J1^~(jw) v]^-1 for the graph direction v = (1, h)
/// (v = (0, 1) when h is infinite). Zero exactly when h = G1(jw).
/// Throws std::domain_error("graph-direction singular").
Complex build_T(const coprime::GraphSymbols& s1, const ExtendedComplex& h, double omega_c);

/// All-pass d(-s)/d(s).
RationalTF all_pass(const lti::Polynomial& d);

/// Roll-off term: rho s / (s^2 + rho s + w^2) for finite w (rho / (s + rho)
/// at w = 0) and s / (s + rho) at w = inf. Equals 1 at s = j*w.
RationalTF rolloff(double omega_c, double rho);

/// Blaschke-type reflection of a real unstable pole p (unit modulus on the
/// imaginary axis).
RationalTF blaschke_factor(double p, double omega_c);

/// Stable Delta with Delta(jw_c) = Omega^~(jw_c) T, sup |Delta| = |T|
/// attained at w_c, and Delta(inf) = 0 (Delta(0) = 0 for w_c = inf).
/// Throws std::runtime_error("interpolation failed").
DeltaParts build_delta(Complex T, double omega_c, const RationalTF& Omega, double rho,
                       DSignRule rule = DSignRule::standard);

struct Construction {
  RationalTF G2;
  DeltaParts delta;
};

/// Builds G2 from J2 = J1 + K1^~ Omega Delta with Omega = d(-s)/d(s):
/// M2 = (m - n(-s) Delta)/d, N2 = (n + m(-s) Delta)/d, G2 = N2/M2.
/// Requires target.beta < b_max(G1).
Construction construct_system(const RationalTF& g1, const InterpolationTarget& target, double rho,
                              double cancel_tol = 1e-7, DSignRule rule = DSignRule::standard);

struct WorstMember {
  std::size_t index = 0;
  double distance = 0.0;
};

WorstMember worst_member(const RationalTF& gp, const std::vector<RationalTF>& cluster,
                         const FrequencyGrid& grid = FrequencyGrid::default_grid());

struct WorstFrequency {
  double omega_c = 0.0;
  double kappa = 0.0;
  double grid_max = 0.0;
};

/// Maximizer of kappa(gp(jw), gt(jw)) (0 and inf are candidates). Throws
/// std::domain_error("no pointwise maximizer semantics") for pairs whose
/// winding condition fails.
WorstFrequency worst_frequency(const RationalTF& gp, const RationalTF& gt,
                               const FrequencyGrid& grid = FrequencyGrid::default_grid());

struct PrototypeConfig {
  int k_max = 20;
  double rho0_factor = 10.0;
  double improvement_tol = 1e-4;
  int max_outer = 50;
  int max_order = 30;
  double cancel_tol = 1e-7;
  FrequencyGrid grid = FrequencyGrid::default_grid();
};

struct TraceEntry {
  int iteration = 0;
  /// Adaptation frequency of the step (none for the initial system).
  std::optional<double> omega_c;
  double max_distance = 0.0;
};

struct PrototypeResult {
  RationalTF G_proto;
  RationalTF G_init;
  std::size_t init_index = 0;
  std::vector<TraceEntry> trace;
  double max_distance = 0.0;
  double b_max_proto = 0.0;
  bool certified = false;
  std::vector<double> member_distances;
  std::string stop_reason;
};

/// Iterative prototype construction. Starts from the medoid of `cluster`
/// (using D, a distance matrix over exactly these members) and repeatedly
/// moves the prototype at the worst frequency towards the pointwise
/// Chebyshev centre of the members, accepting only strict improvements of
/// the maximal nu-gap.
PrototypeResult prototype(const std::vector<RationalTF>& cluster, const metric::DistanceMatrix& D,
                          const PrototypeConfig& cfg = {});

}  // namespace nugap::proto
