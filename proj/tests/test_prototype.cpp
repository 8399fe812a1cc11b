#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nugap/chebyshev.hpp"
#include "nugap/prototype.hpp"
#include "support.hpp"

using namespace nugap::proto;
using nugap::coprime::GraphSymbols;
using nugap::lti::kInfFrequency;
using nugap::lti::tf_make;
using nugap::metric::DistanceMatrix;
using testing::cplx;

namespace {

/// Brute-force minimax over a polar grid in the plane and the point at infinity.
double grid_chebyshev_radius(const std::vector<cplx>& values) {
  auto radius_at = [&](testing::Value h) {
    double r = 0.0;
    for (const auto& v : values) r = std::max(r, testing::chordal(h, {v}));
    return r;
  };
  double best = radius_at({0.0, true});
  cplx arg = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double mag = 1e-3 * std::pow(1e6, i / 400.0);
    for (int k = 0; k < 360; ++k) {
      const cplx h = std::polar(mag, 2.0 * std::numbers::pi * k / 360.0);
      const double r = radius_at({h});
      if (r < best) best = r, arg = h;
    }
  }
  best = std::min(best, radius_at({0.0}));
  // local refinement around the best grid point
  double step = std::abs(arg) * 0.02 + 1e-3;
  for (int it = 0; it < 200; ++it) {
    bool moved = false;
    for (const cplx d : {cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}, cplx{0, -1}}) {
      const double r = radius_at({arg + step * d});
      if (r < best) best = r, arg += step * d, moved = true;
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

double sup_abs(const RationalTF& f, double* argmax = nullptr) {
  double best = std::abs(testing::eval(f, 0.0).v), arg = 0.0;
  for (int i = 0; i <= 40000; ++i) {
    const double w = 1e-5 * std::pow(1e10, i / 40000.0);
    const double v = std::abs(testing::eval(f, {0.0, w}).v);
    if (v > best) best = v, arg = w;
  }
  if (argmax) *argmax = arg;
  return best;
}

std::vector<RationalTF> stable_pool(std::uint64_t seed, int count) {
  testing::Rng rng(seed);
  std::vector<RationalTF> out;
  for (int i = 0; i < count; ++i) out.push_back(testing::random_system(rng, 1 + static_cast<int>(rng.below(3)), false));
  return out;
}

}  // namespace

TEST_CASE("chebyshev_point") {
  SUBCASE("two real values") {
    const auto c = chebyshev_point({ExtendedComplex::finite(1.0), ExtendedComplex::finite(3.0)});
    const double want = grid_chebyshev_radius({1.0, 3.0});
    CHECK(c.radius == doctest::Approx(want).epsilon(1e-5));
    CHECK_FALSE(c.h.infinite);
    const double k1 = nugap::metric::kappa(c.h, ExtendedComplex::finite(1.0));
    const double k3 = nugap::metric::kappa(c.h, ExtendedComplex::finite(3.0));
    CHECK(k1 == doctest::Approx(k3).epsilon(1e-6));
    // half the chordal distance up to the sphere curvature
    CHECK(c.radius >= 0.5 * nugap::metric::kappa(cplx{1.0}, cplx{3.0}) - 1e-12);
  }
  SUBCASE("single and repeated values") {
    const auto one = chebyshev_point({ExtendedComplex::finite({2.0, -1.0})});
    CHECK(one.radius <= 1e-9);
    CHECK(std::abs(one.h.value - cplx{2.0, -1.0}) <= 1e-6);
    const auto rep = chebyshev_point({ExtendedComplex::finite(0.5), ExtendedComplex::finite(0.5)});
    CHECK(rep.radius <= 1e-9);
    const auto inf = chebyshev_point({ExtendedComplex::infinity(), ExtendedComplex::infinity()});
    CHECK(inf.radius <= 1e-9);
    CHECK((inf.h.infinite || std::abs(inf.h.value) > 1e6));
    CHECK_THROWS_AS(chebyshev_point({}), std::invalid_argument);
  }
  SUBCASE("random sets against the grid minimax") {
    testing::Rng rng(101);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<cplx> vals;
      std::vector<ExtendedComplex> ext;
      const int n = 2 + static_cast<int>(rng.below(6));
      for (int i = 0; i < n; ++i) {
        vals.push_back(std::polar(rng.log_uniform(0.1, 10.0), rng.uniform(-0.6, 0.6)));
        ext.push_back(ExtendedComplex::finite(vals.back()));
      }
      const auto c = chebyshev_point(ext);
      CHECK(c.radius <= grid_chebyshev_radius(vals) + 1e-6);
      double r = 0.0;
      for (const auto& v : ext) r = std::max(r, nugap::metric::kappa(c.h, v));
      CHECK(r == doctest::Approx(c.radius).epsilon(1e-9));
    }
  }
  SUBCASE("sphere round trip") {
    testing::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const cplx a{rng.normal() * 4, rng.normal() * 4}, b{rng.normal(), rng.normal()};
      const auto pa = to_sphere(ExtendedComplex::finite(a)), pb = to_sphere(ExtendedComplex::finite(b));
      const double chord = std::sqrt(std::pow(pa[0] - pb[0], 2) + std::pow(pa[1] - pb[1], 2) + std::pow(pa[2] - pb[2], 2));
      CHECK(chord == doctest::Approx(testing::chordal({a}, {b})).epsilon(1e-10));
      CHECK(std::abs(from_sphere(pa).value - a) <= 1e-9 * (1.0 + std::abs(a)));
    }
  }
}

TEST_CASE("build_T, all_pass and rolloff") {
  const auto g = tf_make({1}, {1, 1});
  const GraphSymbols s(g);
  SUBCASE("zero exactly on the graph") {
    for (double w : {0.0, 0.5, 2.0}) {
      CHECK(std::abs(build_T(s, g.freq(w), w)) <= 1e-14);
    }
    CHECK(std::abs(build_T(s, ExtendedComplex::finite(0.0), kInfFrequency)) <= 1e-14);
  }
  SUBCASE("conjugate symmetry and modulus") {
    for (double w : {0.3, 1.0, 4.0}) {
      const cplx h{0.7, 0.4};
      const cplx t = build_T(s, ExtendedComplex::finite(h), w);
      CHECK(std::abs(build_T(s, ExtendedComplex::finite(std::conj(h)), -w) - std::conj(t)) <= 1e-12);
      // |T| is the tangent of the chordal angle: kappa = |T| / sqrt(1 + |T|^2)
      const double k = nugap::metric::kappa(g.freq(w), ExtendedComplex::finite(h));
      CHECK(std::abs(t) / std::sqrt(1.0 + std::norm(t)) == doctest::Approx(k).epsilon(1e-12));
    }
  }
  SUBCASE("all-pass has unit modulus") {
    const auto a = all_pass(nugap::lti::Polynomial{1.0, 3.0, 5.0});
    for (double w : {0.0, 0.1, 1.0, 10.0}) CHECK(std::abs(testing::eval(a, {0.0, w}).v) == doctest::Approx(1.0));
    CHECK(a.is_stable());
  }
  SUBCASE("rolloff equals one at the adaptation frequency") {
    for (double w : {0.1, 1.0, 30.0}) {
      const auto r = rolloff(w, 10.0 * w);
      CHECK(std::abs(testing::eval(r, {0.0, w}).v - 1.0) <= 1e-12);
      CHECK(sup_abs(r) <= 1.0 + 1e-12);
      CHECK(r.is_stable());
    }
    CHECK(std::abs(testing::eval(rolloff(0.0, 5.0), 0.0).v - 1.0) <= 1e-15);
    CHECK(rolloff(kInfFrequency, 5.0).at_infinity() == 1.0);
    CHECK_THROWS_AS(rolloff(1.0, 0.0), std::invalid_argument);
  }
  SUBCASE("blaschke factor is all-pass and stable") {
    const auto f = blaschke_factor(2.0, 1.0);
    CHECK(f.is_stable());
    for (double w : {0.0, 0.5, 8.0}) CHECK(std::abs(testing::eval(f, {0.0, w}).v) == doctest::Approx(1.0));
  }
}

TEST_CASE("build_delta invariants") {
  testing::Rng rng(55);
  const auto Omega = all_pass(nugap::lti::Polynomial{1.0, 1.4, 2.0});
  for (auto rule : {DSignRule::standard, DSignRule::inverted}) {
    int reflected = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const cplx T = std::polar(rng.log_uniform(0.01, 3.0), rng.uniform(-3.1, 3.1));
      const double wc = rng.log_uniform(0.05, 20.0);
      const auto parts = build_delta(T, wc, Omega, 10.0 * wc, rule);
      const cplx want = std::conj(testing::eval(Omega, {0.0, wc}).v) * T;
      CHECK(std::abs(testing::eval(parts.Delta, {0.0, wc}).v - want) <= 1e-8 * (1.0 + std::abs(T)));
      CHECK(parts.Delta.is_stable());
      CHECK(parts.Delta.is_strictly_proper());
      double arg = 0.0;
      const double peak = sup_abs(parts.Delta, &arg);
      CHECK(peak <= std::abs(T) * (1.0 + 1e-6));
      CHECK(std::max(peak, std::abs(testing::eval(parts.Delta, {0.0, wc}).v)) ==
            doctest::Approx(std::abs(T)).epsilon(1e-9));
      for (double w : {0.0, 0.2, 3.0, 50.0}) {
        CHECK(std::abs(testing::eval(parts.Delta1, {0.0, w}).v) == doctest::Approx(1.0).epsilon(1e-9));
      }
      if (!parts.blaschke_factors.empty()) ++reflected;
    }
    if (rule == DSignRule::inverted) CHECK(reflected > 0);
    if (rule == DSignRule::standard) CHECK(reflected == 0);
  }
  SUBCASE("limit frequencies") {
    const auto low = build_delta(cplx{0.4, 0.0}, 0.0, Omega, 100.0);
    CHECK(testing::eval(low.Delta, 0.0).v.real() == doctest::Approx(0.4 * testing::eval(Omega, 0.0).v.real()));
    CHECK(low.Delta.at_infinity() == 0.0);
    const auto high = build_delta(cplx{-0.4, 0.0}, kInfFrequency, Omega, 0.01);
    CHECK(high.Delta.at_infinity() == doctest::Approx(-0.4 * Omega.at_infinity()));
    CHECK(std::abs(testing::eval(high.Delta, 0.0).v) <= 1e-15);
  }
  SUBCASE("zero target") {
    CHECK(build_delta(cplx{0.0}, 1.0, Omega, 10.0).Delta.is_zero());
  }
}

TEST_CASE("construct_system") {
  testing::Rng rng(77);
  int built = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto g1 = testing::random_system(rng, 1 + static_cast<int>(rng.below(3)), trial % 4 == 0);
    const double wc = rng.log_uniform(0.1, 10.0);
    const auto g1c = g1.freq(wc).value;
    const cplx h = g1c + std::polar(0.3 * (1.0 + std::abs(g1c)), rng.uniform(-3.1, 3.1));
    const auto target = make_target(g1, wc, ExtendedComplex::finite(h));
    if (!(target.beta < nugap::coprime::b_max(g1))) {
      CHECK_THROWS_AS(construct_system(g1, target, 10.0 * wc), std::invalid_argument);
      continue;
    }
    Construction c;
    try {
      c = construct_system(g1, target, 10.0 * wc);
    } catch (const std::runtime_error&) {
      continue;
    } catch (const std::domain_error&) {
      continue;
    }
    ++built;
    const auto v = testing::eval(c.G2, {0.0, wc});
    REQUIRE_FALSE(v.inf);
    CHECK(std::abs(v.v - h) <= 1e-6 * (1.0 + std::abs(h)));
    CHECK(testing::chordal({g1c}, v) == doctest::Approx(target.beta).epsilon(1e-6));
    // the new graph is a bounded perturbation of the old one
    const auto r = nugap::metric::nu_gap_detail(g1, c.G2);
    CHECK(r.verdict.feasible());
    CHECK(r.value >= target.beta - 1e-6);
    CHECK(r.value <= std::abs(c.delta.T) + 1e-6);
  }
  CHECK(built >= 15);
}

TEST_CASE("worst_member and worst_frequency") {
  const auto g1 = tf_make({1}, {1, 1}), g2 = tf_make({2}, {1, 1});
  const auto wf = worst_frequency(g1, g2);
  CHECK(wf.omega_c == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(wf.kappa == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  const auto same = worst_frequency(g1, g1);
  CHECK(same.kappa == 0.0);
  CHECK_THROWS_WITH_AS(worst_frequency(g1, tf_make({1}, {1, -1})), "no pointwise maximizer semantics",
                       std::domain_error);
  const auto wm = worst_member(g1, {g1, g2, tf_make({1.5}, {1, 1})});
  CHECK(wm.index == 1);
  CHECK(wm.distance == doctest::Approx(1.0 / 3.0));

  SUBCASE("argmax agrees with the dense grid") {
    const auto pool = stable_pool(19, 10);
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (!nugap::metric::winding_condition(pool[0], pool[i]).feasible()) continue;
      const auto w = worst_frequency(pool[0], pool[i]);
      const double dense = testing::dense_kappa_sup(pool[0], pool[i], 50000);
      CHECK(w.kappa == doctest::Approx(dense).epsilon(1e-5));
      CHECK(testing::chordal(testing::eval(pool[0], {0.0, std::isinf(w.omega_c) ? 1e9 : w.omega_c}),
                             testing::eval(pool[i], {0.0, std::isinf(w.omega_c) ? 1e9 : w.omega_c})) ==
            doctest::Approx(w.kappa).epsilon(1e-6));
    }
  }
}

TEST_CASE("prototype") {
  SUBCASE("singleton") {
    const std::vector<RationalTF> one = {tf_make({1}, {1, 1})};
    const auto r = prototype(one, DistanceMatrix(1, {}));
    CHECK(r.max_distance == 0.0);
    CHECK(r.stop_reason == "zero distance");
    CHECK(r.G_proto == one[0]);
    CHECK(r.certified);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(prototype({}, DistanceMatrix(0, {})), std::invalid_argument);
    CHECK_THROWS_AS(prototype({tf_make({1}, {1, 1})}, DistanceMatrix(2, {})), std::invalid_argument);
  }
  SUBCASE("random stable clusters") {
    testing::Rng rng(91);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<RationalTF> members;
      const double base_tau = rng.log_uniform(0.3, 3.0), base_k = rng.log_uniform(0.5, 3.0);
      for (int i = 0; i < 5; ++i) {
        members.push_back(tf_make({base_k * rng.uniform(0.8, 1.25)}, {base_tau * rng.uniform(0.8, 1.25), 1.0}));
      }
      const auto D = nugap::metric::distance_matrix(members, {}, nugap::lti::FrequencyGrid::default_grid(), 1).matrix;
      const auto r = prototype(members, D);
      REQUIRE_FALSE(r.trace.empty());
      CHECK_FALSE(r.trace[0].omega_c.has_value());
      CHECK(r.trace[0].max_distance == doctest::Approx(r.trace[0].max_distance));
      for (std::size_t k = 1; k < r.trace.size(); ++k) {
        CHECK(r.trace[k].max_distance < r.trace[k - 1].max_distance);
        CHECK(r.trace[k].omega_c.has_value());
      }
      CHECK(r.max_distance == r.trace.back().max_distance);
      CHECK(r.G_init == members[r.init_index]);
      CHECK(r.G_proto.order() <= 30);
      REQUIRE(r.member_distances.size() == members.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < members.size(); ++i) {
        const double d = nugap::metric::nu_gap(r.G_proto, members[i]);
        CHECK(d == doctest::Approx(r.member_distances[i]).epsilon(1e-9));
        worst = std::max(worst, d);
      }
      CHECK(worst == doctest::Approx(r.max_distance));
      double medoid_max = 0.0;
      for (std::size_t i = 0; i < members.size(); ++i) medoid_max = std::max(medoid_max, D(r.init_index, i));
      CHECK(r.max_distance <= medoid_max);
      CHECK(r.certified == (r.b_max_proto > r.max_distance));
      CHECK(r.b_max_proto == doctest::Approx(nugap::coprime::b_max(r.G_proto)));
    }
  }
}
