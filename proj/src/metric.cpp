#include "nugap/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

namespace nugap::metric {

namespace {

constexpr double kAxisRootTol = 1e-7;

std::string format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// |c(jw)| / |dd(jw)| with the omega -> inf limit taken on leading terms.
double ratio_on_axis(const lti::Polynomial& c, const lti::Polynomial& dd, double omega) {
  if (std::isinf(omega)) {
    return std::abs(c.coeff(dd.degree())) / std::abs(dd.leading());
  }
  const lti::Complex s{0.0, omega};
  return std::abs(c(s)) / std::abs(dd(s));
}

}  // namespace

double kappa(lti::Complex g1, lti::Complex g2) {
  return std::abs(g1 - g2) / (std::sqrt(1.0 + std::norm(g1)) * std::sqrt(1.0 + std::norm(g2)));
}

double kappa(const ExtendedComplex& g1, const ExtendedComplex& g2) {
  if (g1.infinite && g2.infinite) return 0.0;
  if (g1.infinite) return 1.0 / std::sqrt(1.0 + std::norm(g2.value));
  if (g2.infinite) return 1.0 / std::sqrt(1.0 + std::norm(g1.value));
  return kappa(g1.value, g2.value);
}

const char* to_string(WindingStatus s) {
  switch (s) {
    case WindingStatus::feasible: return "feasible";
    case WindingStatus::boundary_zero: return "boundary_zero";
    case WindingStatus::nonzero_winding: return "nonzero_winding";
  }
  return "unknown";
}

lti::Polynomial winding_numerator(const coprime::GraphSymbols& g1, const coprime::GraphSymbols& g2) {
  return g2.m().mirrored() * g1.m() + g2.n().mirrored() * g1.n();
}

WindingVerdict winding_condition(const coprime::GraphSymbols& g1, const coprime::GraphSymbols& g2) {
  const lti::Polynomial phi = winding_numerator(g1, g2);
  const int full_degree = g1.d().degree() + g2.d().degree();

  // Value of J2^~ J1 at s = inf; a vanishing limit is a boundary zero at inf.
  const double at_inf = std::abs(phi.coeff(full_degree)) / (std::abs(g1.d().leading()) * std::abs(g2.d().leading()));
  if (phi.is_zero() || at_inf <= kAxisRootTol) return {WindingStatus::boundary_zero, 0};

  int rhp = 0;
  if (phi.degree() > 0) {
    for (const lti::Complex& r : lti::poly_roots(phi)) {
      if (std::abs(r.real()) <= kAxisRootTol * (1.0 + std::abs(r))) return {WindingStatus::boundary_zero, 0};
      if (r.real() > 0.0) ++rhp;
    }
  }
  const int wno = rhp - g2.d().degree();
  return {wno == 0 ? WindingStatus::feasible : WindingStatus::nonzero_winding, wno};
}

WindingVerdict winding_condition(const RationalTF& g1, const RationalTF& g2) {
  return winding_condition(coprime::graph_symbols(g1), coprime::graph_symbols(g2));
}

double pointwise_kappa(const RationalTF& g1, const RationalTF& g2, double omega) {
  return kappa(g1.freq(omega), g2.freq(omega));
}

NuGapResult nu_gap_detail(const coprime::GraphSymbols& s1, const RationalTF& g1, const coprime::GraphSymbols& s2,
                          const RationalTF& g2, const FrequencyGrid& grid) {
  NuGapResult res;
  if (g1 == g2) {
    res.value = 0.0;
    return res;
  }
  res.verdict = winding_condition(s1, s2);
  if (!res.verdict.feasible()) {
    res.value = 1.0;
    return res;
  }
  // |K2 J1| = |m2 n1 - n2 m1| / |d1 d2| on the axis.
  const lti::Polynomial cross = g2.den() * g1.num() - g2.num() * g1.den();
  const lti::Polynomial dd = s1.d() * s2.d();
  const auto sup = lti::hinf_norm([&](double w) { return ratio_on_axis(cross, dd, w); }, grid);
  res.value = std::clamp(sup.value, 0.0, 1.0);
  res.omega = sup.omega;
  return res;
}

NuGapResult nu_gap_detail(const RationalTF& g1, const RationalTF& g2, const FrequencyGrid& grid) {
  try {
    return nu_gap_detail(coprime::graph_symbols(g1), g1, coprime::graph_symbols(g2), g2, grid);
  } catch (const std::exception& e) {
    NuGapResult res;
    res.value = 1.0;
    res.verdict = {WindingStatus::boundary_zero, 0};
    res.warning = std::string("factorization failed: ") + e.what();
    return res;
  }
}

double nu_gap(const RationalTF& g1, const RationalTF& g2, const FrequencyGrid& grid) {
  return nu_gap_detail(g1, g2, grid).value;
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)), values_(n * n, 0.0) {
  if (labels_.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels_.push_back("G" + std::to_string(i));
  }
  if (labels_.size() != n) throw std::invalid_argument("DistanceMatrix: label count mismatch");
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double v) {
  values_[i * n_ + j] = v;
  values_[j * n_ + i] = v;
}

DistanceMatrix DistanceMatrix::subset(const std::vector<std::size_t>& idx) const {
  std::vector<std::string> labels;
  for (std::size_t i : idx) labels.push_back(labels_[i]);
  DistanceMatrix out(idx.size(), std::move(labels));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) out.set(a, b, (*this)(idx[a], idx[b]));
  }
  return out;
}

std::string DistanceMatrix::to_csv() const {
  std::ostringstream os;
  os << "id";
  for (const auto& l : labels_) os << ',' << l;
  os << '\n';
  for (std::size_t i = 0; i < n_; ++i) {
    os << labels_[i];
    for (std::size_t j = 0; j < n_; ++j) os << ',' << format9((*this)(i, j));
    os << '\n';
  }
  return os.str();
}

DistanceReport distance_matrix(const std::vector<RationalTF>& systems, std::vector<std::string> labels,
                               const FrequencyGrid& grid, unsigned workers) {
  const std::size_t n = systems.size();
  if (n < 2) throw std::invalid_argument("distance_matrix needs at least two systems");
  DistanceReport report{DistanceMatrix(n, std::move(labels)), {}};

  std::vector<std::optional<coprime::GraphSymbols>> symbols(n);
  std::vector<std::string> symbol_errors(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      symbols[i].emplace(systems[i]);
    } catch (const std::exception& e) {
      symbol_errors[i] = e.what();
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<NuGapResult> results(pairs.size());

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < pairs.size(); k += stride) {
      const auto [i, j] = pairs[k];
      NuGapResult& r = results[k];
      if (!symbols[i] || !symbols[j]) {
        r.value = 1.0;
        r.verdict = {WindingStatus::boundary_zero, 0};
        r.warning = "factorization failed: " + (symbols[i] ? symbol_errors[j] : symbol_errors[i]);
        continue;
      }
      try {
        r = nu_gap_detail(*symbols[i], systems[i], *symbols[j], systems[j], grid);
      } catch (const std::exception& e) {
        r.value = 1.0;
        r.warning = std::string("nu-gap evaluation failed: ") + e.what();
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    report.matrix.set(i, j, results[k].value);
    if (results[k].warning) report.warnings.push_back({i, j, *results[k].warning});
  }
  return report;
}

}  // namespace nugap::metric
