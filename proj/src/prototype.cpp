#include "nugap/prototype.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nugap/cluster.hpp"

namespace nugap::proto {

namespace {

constexpr int kMaxCompensationRounds = 5;
constexpr double kInterpolationTol = 1e-6;

bool is_limit(double omega) { return omega == 0.0 || std::isinf(omega); }

// (M(jw), N(jw)) including the w = inf limit.
std::pair<Complex, Complex> image_at(const coprime::GraphSymbols& s, double omega) {
  if (std::isinf(omega)) {
    const int deg = s.d().degree();
    return {Complex{s.m().coeff(deg) / s.d().leading()}, Complex{s.n().coeff(deg) / s.d().leading()}};
  }
  return s.image(Complex{0.0, omega});
}

int pick_sign(Complex T1, DSignRule rule) {
  const int standard = T1.imag() > 0.0 ? 1 : -1;
  return rule == DSignRule::standard ? standard : -standard;
}

// First-order interpolant taking the unit-modulus value t at s = j*omega_c:
// (s/wc Im w + Re w)^-1 + D with w = (t - D)^-1. Degenerates to the constant
// t when t is real (D = -t) or at the limit frequencies.
RationalTF first_order_interpolant(Complex t, double omega_c, int D, int& D_used) {
  if (is_limit(omega_c) || t.imag() == 0.0) {
    const double r = t.real() >= 0.0 ? 1.0 : -1.0;
    D_used = -static_cast<int>(r);
    return RationalTF::gain(r);
  }
  D_used = D;
  const Complex w = 1.0 / (t - static_cast<double>(D));
  const double a = w.imag() / omega_c;
  const double b = w.real();
  return RationalTF(lti::Polynomial{D * a, D * b + 1.0}, lti::Polynomial{a, b});
}

// nu-gap of a candidate to every member, abandoned (nullopt) as soon as
// one distance reaches `bound`. Members are visited worst-first.
std::optional<std::vector<double>> bounded_distances(const RationalTF& cand, const std::vector<RationalTF>& members,
                                                     const std::vector<coprime::GraphSymbols>& symbols,
                                                     const std::vector<std::size_t>& order, double bound,
                                                     const FrequencyGrid& grid) {
  std::optional<coprime::GraphSymbols> cs;
  try {
    cs.emplace(cand);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  std::vector<double> out(members.size(), 0.0);
  for (std::size_t i : order) {
    const auto r = metric::nu_gap_detail(*cs, cand, symbols[i], members[i], grid);
    if (r.warning || r.value >= bound) return std::nullopt;
    out[i] = r.value;
  }
  return out;
}

}  // namespace

InterpolationTarget make_target(const RationalTF& g, double omega_c, const ExtendedComplex& h) {
  return {omega_c, h, metric::kappa(g.freq(omega_c), h)};
}

Complex build_T(const coprime::GraphSymbols& s1, const ExtendedComplex& h, double omega_c) {
  const auto [M, N] = image_at(s1, omega_c);
  const Complex h_in = h.infinite ? Complex{0.0} : Complex{1.0};
  const Complex h_out = h.infinite ? Complex{1.0} : h.value;
  const Complex num = h_out * M - h_in * N;
  const Complex den = h_in * std::conj(M) + h_out * std::conj(N);
  if (std::abs(den) <= 1e-14 * (std::abs(h_in) + std::abs(h_out))) {
    throw std::domain_error("graph-direction singular");
  }
  Complex T = num / den;
  if (is_limit(omega_c)) T = {T.real(), 0.0};
  return T;
}

RationalTF all_pass(const lti::Polynomial& d) { return RationalTF(d.mirrored(), d); }

RationalTF rolloff(double omega_c, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rolloff: rho must be positive");
  if (std::isinf(omega_c)) return RationalTF(lti::Polynomial{1.0, 0.0}, lti::Polynomial{1.0, rho});
  if (omega_c == 0.0) return RationalTF(lti::Polynomial{rho}, lti::Polynomial{1.0, rho});
  return RationalTF(lti::Polynomial{rho, 0.0}, lti::Polynomial{1.0, rho, omega_c * omega_c});
}

RationalTF blaschke_factor(double p, double omega_c) {
  // (s - p)(s/wc - wc/p) / ((s + p)(s/wc - wc/p)) for real p: the second
  // pair cancels, leaving the first-order all-pass.
  (void)omega_c;
  return RationalTF(lti::Polynomial{1.0, -p}, lti::Polynomial{1.0, p});
}

DeltaParts build_delta(Complex T, double omega_c, const RationalTF& Omega, double rho, DSignRule rule) {
  if (!(rho > 0.0)) throw std::invalid_argument("build_delta: rho must be positive");
  DeltaParts parts;
  parts.T = T;
  parts.Omega = Omega;
  parts.rho = rho;
  parts.rolloff = rolloff(omega_c, rho);

  const ExtendedComplex om = Omega.freq(omega_c);
  Complex target = std::conj(om.value) * T;
  if (is_limit(omega_c)) target = {target.real(), 0.0};
  parts.Sigma = std::abs(target);
  if (parts.Sigma == 0.0) {
    parts.Delta = RationalTF();
    parts.Delta1 = RationalTF::gain(1.0);
    return parts;
  }
  parts.T1 = target / parts.Sigma;
  parts.T2 = 1.0;
  parts.D2 = -1;  // Delta2 = (1 - (-1)) ... = 1 for T2 = 1

  Complex t = parts.T1;
  RationalTF reflections = RationalTF::gain(1.0);
  bool stable = false;
  for (int round = 0; round <= kMaxCompensationRounds; ++round) {
    const DSignRule r = round == 0 ? rule : DSignRule::standard;
    int D_used = 0;
    parts.Delta1 = first_order_interpolant(t, omega_c, pick_sign(t, r), D_used);
    parts.D1 = D_used;
    const auto poles = parts.Delta1.poles();
    auto bad = std::find_if(poles.begin(), poles.end(), [](const Complex& p) { return p.real() >= 0.0; });
    if (bad == poles.end()) {
      stable = true;
      break;
    }
    // Reflect the pole, then re-aim the interpolant so the product still
    // hits T1: the reflection is unit-modulus but not 1 at j*w_c.
    const RationalTF F = blaschke_factor(bad->real(), omega_c);
    parts.blaschke_factors.push_back(F);
    reflections = reflections * F;
    const Complex f_c = reflections.freq(omega_c).value;
    t = parts.T1 * std::conj(f_c) / std::abs(f_c);
    parts.compensation_rounds = round + 1;
  }
  if (!stable) throw std::runtime_error("interpolation failed");

  parts.Delta = RationalTF::gain(parts.Sigma) * parts.Delta1 * reflections * parts.rolloff;
  const ExtendedComplex at_c = parts.Delta.freq(omega_c);
  if (at_c.infinite || std::abs(at_c.value - target) > kInterpolationTol * (1.0 + std::abs(T))) {
    throw std::runtime_error("interpolation failed");
  }
  if (parts.Delta.stability() != lti::Stability::stable) throw std::runtime_error("interpolation failed");
  return parts;
}

Construction construct_system(const RationalTF& g1, const InterpolationTarget& target, double rho, double cancel_tol,
                              DSignRule rule) {
  const double bm = coprime::b_max(g1);
  if (!(target.beta < bm)) throw std::invalid_argument("construct_system: beta must be below b_max(G1)");
  const coprime::GraphSymbols s1(g1);
  const Complex T = build_T(s1, target.h, target.omega_c);
  DeltaParts parts = build_delta(T, target.omega_c, all_pass(s1.d()), rho, rule);

  const lti::Polynomial& a = parts.Delta.num();
  const lti::Polynomial& b = parts.Delta.den();
  const lti::Polynomial num2 = (s1.n() * b + s1.m().mirrored() * a).trimmed(1e-13);
  const lti::Polynomial den2 = (s1.m() * b - s1.n().mirrored() * a).trimmed(1e-13);
  if (den2.is_zero() || num2.degree() > den2.degree()) throw std::domain_error("degenerate image");
  RationalTF g2(num2, den2, cancel_tol);

  const ExtendedComplex got = g2.freq(target.omega_c);
  const ExtendedComplex& h = target.h;
  bool ok = false;
  if (h.infinite) {
    ok = got.infinite || std::abs(got.value) >= 1.0 / kInterpolationTol;
  } else {
    ok = !got.infinite && std::abs(got.value - h.value) <= kInterpolationTol * (1.0 + std::abs(h.value));
  }
  if (!ok) throw std::runtime_error("interpolation failed");
  return {std::move(g2), std::move(parts)};
}

WorstMember worst_member(const RationalTF& gp, const std::vector<RationalTF>& cluster, const FrequencyGrid& grid) {
  if (cluster.empty()) throw std::invalid_argument("worst_member of an empty cluster");
  WorstMember w{0, -1.0};
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    const double d = metric::nu_gap(gp, cluster[i], grid);
    if (d > w.distance) w = {i, d};
  }
  return w;
}

WorstFrequency worst_frequency(const RationalTF& gp, const RationalTF& gt, const FrequencyGrid& grid) {
  const auto sp = coprime::graph_symbols(gp);
  const auto st = coprime::graph_symbols(gt);
  if (gp == gt) return {grid.min(), 0.0, 0.0};
  if (!metric::winding_condition(sp, st).feasible()) throw std::domain_error("no pointwise maximizer semantics");
  const lti::Polynomial cross = gt.den() * gp.num() - gt.num() * gp.den();
  const lti::Polynomial dd = sp.d() * st.d();
  const auto sup = lti::hinf_norm(
      [&](double w) {
        if (std::isinf(w)) return std::abs(cross.coeff(dd.degree())) / std::abs(dd.leading());
        const Complex s{0.0, w};
        return std::abs(cross(s)) / std::abs(dd(s));
      },
      grid);
  return {sup.omega, sup.value, sup.grid_max};
}

PrototypeResult prototype(const std::vector<RationalTF>& cluster, const metric::DistanceMatrix& D,
                          const PrototypeConfig& cfg) {
  if (cluster.empty()) throw std::invalid_argument("prototype of an empty cluster");
  if (D.size() != cluster.size()) throw std::invalid_argument("prototype: distance matrix size mismatch");
  const std::size_t n = cluster.size();

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  PrototypeResult res;
  res.init_index = cluster::medoid(all, D);
  res.G_init = cluster[res.init_index];
  res.G_proto = res.G_init;

  std::vector<coprime::GraphSymbols> symbols;
  symbols.reserve(n);
  for (const auto& g : cluster) symbols.emplace_back(g);

  std::vector<double> dist(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dist[i] = D(res.init_index, i);
  double cur_max = *std::max_element(dist.begin(), dist.end());
  res.trace.push_back({0, std::nullopt, cur_max});
  res.stop_reason = "max_outer reached";

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    if (cur_max == 0.0) {
      res.stop_reason = "zero distance";
      break;
    }
    const std::size_t worst = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    WorstFrequency wf;
    try {
      wf = worst_frequency(res.G_proto, cluster[worst], cfg.grid);
    } catch (const std::domain_error&) {
      res.stop_reason = "worst member infeasible";
      break;
    }
    const double wc = wf.omega_c;

    std::vector<ExtendedComplex> values;
    for (const auto& g : cluster) values.push_back(g.freq(wc));
    ChebyshevPoint cheb = chebyshev_point(values);
    if (is_limit(wc) && !cheb.h.infinite) cheb.h.value = {cheb.h.value.real(), 0.0};
    const InterpolationTarget target = make_target(res.G_proto, wc, cheb.h);
    if (target.beta <= 1e-12) {
      res.stop_reason = "prototype already at pointwise centre";
      break;
    }
    if (!(target.beta < coprime::b_max(res.G_proto))) {
      res.stop_reason = "beta exceeds b_max";
      break;
    }

    // Members in decreasing current distance, so hopeless candidates fail fast.
    std::vector<std::size_t> order = all;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });

    double rho = std::isinf(wc) ? cfg.grid.min() / cfg.rho0_factor
                 : wc == 0.0     ? cfg.rho0_factor * cfg.grid.max()
                                 : cfg.rho0_factor * wc;
    std::optional<std::pair<RationalTF, std::vector<double>>> accepted;
    for (int k = 0; k < cfg.k_max && !accepted; ++k) {
      try {
        Construction c = construct_system(res.G_proto, target, rho, cfg.cancel_tol);
        if (c.G2.order() <= cfg.max_order) {
          if (auto d = bounded_distances(c.G2, cluster, symbols, order, cur_max, cfg.grid)) {
            accepted.emplace(std::move(c.G2), std::move(*d));
          }
        }
      } catch (const std::exception&) {
        // construction failures just move on to the next rho
      }
      // at w_c = inf the roll-off narrows as rho grows
      rho = std::isinf(wc) ? 2.0 * rho : 0.5 * rho;
    }
    if (!accepted) {
      res.stop_reason = "no improving construction";
      break;
    }
    const double new_max = *std::max_element(accepted->second.begin(), accepted->second.end());
    const double improvement = cur_max - new_max;
    res.G_proto = std::move(accepted->first);
    dist = std::move(accepted->second);
    cur_max = new_max;
    res.trace.push_back({outer, wc, cur_max});
    if (improvement < cfg.improvement_tol) {
      res.stop_reason = "improvement below tolerance";
      break;
    }
  }

  res.max_distance = cur_max;
  res.member_distances = dist;
  res.b_max_proto = coprime::b_max(res.G_proto);
  res.certified = res.b_max_proto > res.max_distance;
  return res;
}

}  // namespace nugap::proto
