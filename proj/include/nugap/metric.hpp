#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nugap/coprime.hpp"
#include "nugap/frequency.hpp"
#include "nugap/rational.hpp"

namespace nugap::metric {

using lti::ExtendedComplex;
using lti::FrequencyGrid;
using lti::RationalTF;

/// Chordal distance on the Riemann sphere of diameter 1.
double kappa(const ExtendedComplex& g1, const ExtendedComplex& g2);
double kappa(lti::Complex g1, lti::Complex g2);

enum class WindingStatus { feasible, boundary_zero, nonzero_winding };

struct WindingVerdict {
  WindingStatus status = WindingStatus::feasible;
  /// Winding number; meaningful unless status is boundary_zero.
  int wno = 0;

  bool feasible() const { return status == WindingStatus::feasible; }
};

const char* to_string(WindingStatus s);

/// Numerator of J2^~ J1: m2(-s) m1(s) + n2(-s) n1(s).
lti::Polynomial winding_numerator(const coprime::GraphSymbols& g1, const coprime::GraphSymbols& g2);

/// The side condition of the nu-gap: J2^~ J1 has no zero on the extended
/// imaginary axis and zero winding number. The winding number is the number
/// of open right-half-plane zeros of the numerator minus deg d2 (the
/// right-half-plane poles contributed by d2(-s)).
WindingVerdict winding_condition(const coprime::GraphSymbols& g1, const coprime::GraphSymbols& g2);
WindingVerdict winding_condition(const RationalTF& g1, const RationalTF& g2);

/// kappa(g1(jw), g2(jw)) for omega in [0, inf].
double pointwise_kappa(const RationalTF& g1, const RationalTF& g2, double omega);

struct NuGapResult {
  double value = 1.0;
  WindingVerdict verdict;
  /// Frequency of the pointwise maximum (feasible pairs only).
  double omega = 0.0;
  std::optional<std::string> warning;
};

NuGapResult nu_gap_detail(const coprime::GraphSymbols& s1, const RationalTF& g1,
                          const coprime::GraphSymbols& s2, const RationalTF& g2,
                          const FrequencyGrid& grid = FrequencyGrid::default_grid());
NuGapResult nu_gap_detail(const RationalTF& g1, const RationalTF& g2,
                          const FrequencyGrid& grid = FrequencyGrid::default_grid());
/// Nu-gap distance in [0, 1].
double nu_gap(const RationalTF& g1, const RationalTF& g2,
              const FrequencyGrid& grid = FrequencyGrid::default_grid());

/// Symmetric matrix of pairwise nu-gap distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<std::string> labels);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v);
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  DistanceMatrix subset(const std::vector<std::size_t>& idx) const;

  /// Full matrix with row/column headers, 9 significant digits.
  std::string to_csv() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

struct PairWarning {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string message;
};

struct DistanceReport {
  DistanceMatrix matrix;
  std::vector<PairWarning> warnings;
};

/// All unordered pairs, fanned out over worker threads; the result does not
/// depend on evaluation order. Labels default to "G0", "G1", ...
DistanceReport distance_matrix(const std::vector<RationalTF>& systems,
                               std::vector<std::string> labels = {},
                               const FrequencyGrid& grid = FrequencyGrid::default_grid(),
                               unsigned workers = 0);

}  // namespace nugap::metric
