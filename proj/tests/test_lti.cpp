#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "nugap/frequency.hpp"
#include "nugap/polynomial.hpp"
#include "nugap/rational.hpp"
#include "nugap/state_space.hpp"
#include "support.hpp"

using namespace nugap::lti;
using testing::cplx;

namespace {

// C (sI - A)^-1 B + D by a dense complex solve, independent of ss_to_tf.
cplx realization_at(const StateSpace& sys, int input, cplx s) {
  const auto n = sys.A.rows();
  cplx v = sys.D(0, input);
  if (n == 0) return v;
  const Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<cplx>();
  const Eigen::VectorXcd x = M.fullPivLu().solve(sys.B.col(input).cast<cplx>());
  return v + (sys.C.cast<cplx>() * x)(0, 0);
}

}  // namespace

TEST_CASE("poly_roots") {
  SUBCASE("factored quadratic") {
    const auto r = poly_roots(Polynomial{1.0, 3.0, 2.0});
    REQUIRE(r.size() == 2);
    CHECK(r[0].real() == doctest::Approx(-2.0));
    CHECK(r[1].real() == doctest::Approx(-1.0));
    CHECK(r[0].imag() == 0.0);
  }
  SUBCASE("conjugate pair is exact and ordered") {
    const auto r = poly_roots(Polynomial{1.0, 0.0, 1.0});
    REQUIRE(r.size() == 2);
    CHECK(r[0] == std::conj(r[1]));
    CHECK(r[0].imag() == doctest::Approx(-1.0));
    CHECK(std::abs(r[0].real()) < 1e-12);
  }
  SUBCASE("cubic residual") {
    const Polynomial p{1.0, 2.0, 2.0, 1.0};
    for (const auto& r : poly_roots(p)) CHECK(std::abs(testing::horner(p.coeffs(), r)) <= 1e-10);
  }
  SUBCASE("zero polynomial") { CHECK_THROWS_AS(poly_roots(Polynomial{}), std::domain_error); }
  SUBCASE("random stable polynomials") {
    testing::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const int deg = 1 + static_cast<int>(rng.below(6));
      const auto g = testing::random_system(rng, deg, false);
      const Polynomial& p = g.den();
      const auto roots = poly_roots(p);
      CHECK(roots.size() == static_cast<std::size_t>(deg));
      for (const auto& r : roots) {
        CHECK(std::abs(testing::horner(p.coeffs(), r)) / p.max_abs() <= 1e-8 * std::max(1.0, std::pow(std::abs(r), deg)));
      }
    }
  }
}

TEST_CASE("tf_make canonical form") {
  SUBCASE("plain lag") {
    const auto g = tf_make({1}, {1, 1});
    CHECK(g.num() == Polynomial{1.0});
    CHECK(g.den() == Polynomial{1.0, 1.0});
  }
  SUBCASE("common factor cancels") {
    const auto g = tf_make({1, 1}, {1, 2, 1});
    CHECK(g.num() == Polynomial{1.0});
    CHECK(g.den().degree() == 1);
    CHECK(g.den().coeff(0) == doctest::Approx(1.0));
  }
  SUBCASE("monic denominator") {
    const auto g = tf_make({2, 0}, {2, 2});
    CHECK(g.num().coeff(1) == doctest::Approx(1.0));
    CHECK(g.num().coeff(0) == 0.0);
    CHECK(g.den() == Polynomial{1.0, 1.0});
  }
  SUBCASE("errors") {
    CHECK_THROWS_WITH_AS(tf_make({1, 0, 0}, {1, 1}), "improper system", std::invalid_argument);
    CHECK_THROWS_AS(tf_make({1}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(tf_make({1}, {}), std::invalid_argument);
  }
  SUBCASE("zero function") {
    const auto g = tf_make({0}, {1, 3});
    CHECK(g.is_zero());
    CHECK(g.den() == Polynomial{1.0});
  }
  SUBCASE("idempotent under common factors") {
    testing::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const auto g = testing::random_system(rng, 1 + static_cast<int>(rng.below(4)), rng.uniform() < 0.5);
      const Polynomial f{1.0, rng.uniform(0.5, 3.0)};
      const RationalTF h(f * g.num(), f * g.den());
      CHECK(coefficient_distance(g, h) <= 1e-9 * (1.0 + g.den().max_abs() + g.num().max_abs()));
      CHECK(tf_make(g.num().coeffs(), g.den().coeffs()) == g);
    }
  }
}

TEST_CASE("evaluation, poles and stability") {
  const auto lag = tf_make({1}, {1, 1});
  CHECK(lag(Complex{0.0}).value == Complex{1.0});
  const auto v = lag(Complex{0.0, 1.0});
  CHECK(v.value.real() == doctest::Approx(0.5));
  CHECK(v.value.imag() == doctest::Approx(-0.5));
  CHECK(tf_make({1}, {1, 0})(Complex{0.0}).infinite);
  CHECK(tf_make({1}, {1, 0}).freq(0.0).infinite);
  CHECK(tf_make({2, 1}, {1, 3}).freq(kInfFrequency).value == Complex{2.0});

  CHECK(lag.stability() == Stability::stable);
  CHECK(tf_make({1}, {1, -1}).stability() == Stability::unstable);
  CHECK(tf_make({1}, {1, 0}).stability() == Stability::marginal);
  CHECK_FALSE(tf_make({1}, {1, 0}).is_stable());
  const auto poles = tf_make({1}, {1, 3, 2}).poles();
  REQUIRE(poles.size() == 2);
  CHECK(poles[0].real() == doctest::Approx(-2.0));
}

TEST_CASE("tf_to_ss") {
  SUBCASE("first-order lag") {
    const RationalTF row[] = {tf_make({1}, {1, 1})};
    const auto sys = tf_to_ss(row);
    CHECK(sys.order() == 1);
    CHECK(sys.A(0, 0) == doctest::Approx(-1.0));
    CHECK(sys.D(0, 0) == 0.0);
  }
  SUBCASE("biproper entry splits off D") {
    const RationalTF row[] = {tf_make({1, 0}, {1, 1})};
    const auto sys = tf_to_ss(row);
    CHECK(sys.D(0, 0) == doctest::Approx(1.0));
    CHECK((sys.C * sys.B)(0, 0) == doctest::Approx(-1.0));
    CHECK(sys.A(0, 0) == doctest::Approx(-1.0));
  }
  SUBCASE("two-input row over a shared denominator") {
    const double r2 = std::numbers::sqrt2;
    const RationalTF row[] = {tf_make({-1}, {1, r2}), tf_make({1, 1}, {1, r2})};
    const auto sys = tf_to_ss(row);
    CHECK(sys.order() == 1);
    CHECK(sys.inputs() == 2);
    for (double w : {0.0, 0.1, 1.0, 7.0, 300.0}) {
      for (int k = 0; k < 2; ++k) {
        const cplx s{0.0, w};
        const cplx want = testing::eval(row[k], s).v;
        CHECK(std::abs(realization_at(sys, k, s) - want) <= 1e-10 * (1.0 + std::abs(want)));
      }
    }
  }
  SUBCASE("random rows round-trip") {
    testing::Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
      const RationalTF row[] = {testing::random_system(rng, 1 + static_cast<int>(rng.below(4)), false),
                                testing::random_system(rng, 1 + static_cast<int>(rng.below(3)), false)};
      const auto sys = tf_to_ss(row);
      CHECK(sys.order() == row[0].order() + row[1].order());
      for (double w : {0.01, 0.5, 2.0, 40.0}) {
        for (int k = 0; k < 2; ++k) {
          const cplx want = testing::eval(row[k], {0.0, w}).v;
          CHECK(std::abs(realization_at(sys, k, {0.0, w}) - want) <= 1e-7 * (1.0 + std::abs(want)));
        }
      }
      // the shared realization is non-minimal for each entry, so compare values
      const auto back = ss_to_tf(sys, 0);
      for (double w : {0.03, 0.7, 9.0}) {
        const cplx want = testing::eval(row[0], {0.0, w}).v;
        CHECK(std::abs(testing::eval(back, {0.0, w}).v - want) <= 1e-6 * (1.0 + std::abs(want)));
      }
    }
  }
}

TEST_CASE("lyapunov_solve") {
  SUBCASE("scalar") {
    const auto P = lyapunov_solve(Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Constant(1, 1, 2.0));
    CHECK(P(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("graph-symbol gramian of a lag") {
    const double r2 = std::numbers::sqrt2;
    Eigen::MatrixXd B(1, 2);
    B << -1.0, 1.0 - r2;
    const auto P = lyapunov_solve(Eigen::MatrixXd::Constant(1, 1, -r2), B * B.transpose());
    CHECK(P(0, 0) == doctest::Approx(r2 - 1.0).epsilon(1e-12));
  }
  SUBCASE("diagonal") {
    const Eigen::MatrixXd A = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
    const auto P = lyapunov_solve(A, Eigen::MatrixXd::Identity(2, 2));
    CHECK(P(0, 0) == doctest::Approx(0.5));
    CHECK(P(1, 1) == doctest::Approx(0.25));
    CHECK(std::abs(P(0, 1)) < 1e-14);
  }
  SUBCASE("unstable") {
    CHECK_THROWS_WITH_AS(lyapunov_solve(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Identity(1, 1)),
                         "unstable Lyapunov", std::domain_error);
  }
  SUBCASE("both solvers agree and leave small residuals") {
    testing::Rng rng(8);
    for (int n : {3, 8, 25}) {
      Eigen::MatrixXd A(n, n), G(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal(), G(i, j) = rng.normal();
      }
      A -= (A.eigenvalues().real().maxCoeff() + 0.5) * Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd Q = G * G.transpose();
      for (auto method : {LyapunovMethod::kronecker, LyapunovMethod::schur}) {
        const auto P = lyapunov_solve(A, Q, method);
        CHECK((A * P + P * A.transpose() + Q).norm() <= 1e-9 * Q.norm() * (1.0 + A.norm()));
        CHECK((P - P.transpose()).norm() <= 1e-12 * P.norm());
      }
      const auto Pk = lyapunov_solve(A, Q, LyapunovMethod::kronecker);
      const auto Ps = lyapunov_solve(A, Q, LyapunovMethod::schur);
      CHECK((Pk - Ps).norm() <= 1e-8 * Pk.norm());
    }
  }
}

TEST_CASE("hankel_norm") {
  SUBCASE("static system") {
    StateSpace sys{Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 1), Eigen::MatrixXd(1, 0), Eigen::MatrixXd::Ones(1, 1)};
    CHECK(hankel_norm(sys) == 0.0);
  }
  SUBCASE("kernel representation of an integrator") {
    StateSpace sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
    sys.B = Eigen::RowVector2d(-1.0, -1.0);
    sys.C = Eigen::MatrixXd::Ones(1, 1);
    sys.D = Eigen::RowVector2d(0.0, 1.0);
    CHECK(hankel_norm(sys) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-12));
  }
  SUBCASE("kernel representation of a lag") {
    // P = sqrt2 - 1, Q = 1/(2 sqrt2) by hand.
    const double r2 = std::numbers::sqrt2;
    StateSpace sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, -r2);
    sys.B = Eigen::RowVector2d(-1.0, 1.0 - r2);
    sys.C = Eigen::MatrixXd::Ones(1, 1);
    sys.D = Eigen::RowVector2d(0.0, 1.0);
    CHECK(hankel_norm(sys) == doctest::Approx(std::sqrt((r2 - 1.0) / (2.0 * r2))).epsilon(1e-12));
    CHECK(hankel_norm(sys) == doctest::Approx(0.38268).epsilon(1e-4));
  }
  SUBCASE("invariant under similarity") {
    testing::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const RationalTF row[] = {testing::random_system(rng, 1 + static_cast<int>(rng.below(5)), false)};
      StateSpace sys = tf_to_ss(row);
      const auto n = sys.A.rows();
      Eigen::MatrixXd T(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) T(i, j) = (i == j ? 2.0 : 0.0) + 0.3 * rng.normal();
      }
      const Eigen::MatrixXd Ti = T.inverse();
      StateSpace t{T * sys.A * Ti, T * sys.B, sys.C * Ti, sys.D};
      CHECK(std::abs(hankel_norm(t) - hankel_norm(sys)) <= 1e-9 * std::max(1.0, hankel_norm(sys)));
    }
  }
  SUBCASE("unstable realization") {
    StateSpace sys{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                   Eigen::MatrixXd::Zero(1, 1)};
    CHECK_THROWS_AS(hankel_norm(sys), std::domain_error);
  }
}

TEST_CASE("hinf_norm") {
  const auto grid = FrequencyGrid::default_grid();
  SUBCASE("low-pass peaks at the zero limit") {
    const auto r = hinf_norm([](double w) { return std::isinf(w) ? 0.0 : 1.0 / std::hypot(1.0, w); }, grid);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.omega == 0.0);
  }
  SUBCASE("high-pass peaks at the infinite limit") {
    const auto r = hinf_norm([](double w) { return std::isinf(w) ? 1.0 : w / std::hypot(1.0, w); }, grid);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(std::isinf(r.omega));
  }
  SUBCASE("interior peak of the chordal distance between 1/(s+1) and 2/(s+1)") {
    // kappa(w) = sqrt(w^2 + 1) / sqrt((w^2 + 2)(w^2 + 5)), maximal 1/3 at w = 1
    const auto f = [](double w) {
      if (std::isinf(w)) return 0.0;
      const double x = w * w;
      return std::sqrt(x + 1.0) / std::sqrt((x + 2.0) * (x + 5.0));
    };
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) best = std::max(best, f(1e-3 * std::pow(1e6, i / 100000.0)));
    const auto r = hinf_norm(f, grid);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-8));
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(r.omega == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.value >= r.grid_max);
  }
  SUBCASE("refinement never lowers the grid maximum") {
    testing::Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      const double a = rng.log_uniform(0.01, 100.0), z = rng.uniform(0.01, 1.0);
      const auto f = [&](double w) {
        if (std::isinf(w)) return 0.0;
        return a * a / std::abs(cplx{a * a - w * w, 2.0 * z * a * w});
      };
      const auto r = hinf_norm(f, grid);
      CHECK(r.value >= r.grid_max);
      const double peak = z < std::sqrt(0.5) ? 1.0 / (2.0 * z * std::sqrt(1.0 - z * z)) : 1.0;
      CHECK(r.value == doctest::Approx(peak).epsilon(1e-4));
    }
  }
  SUBCASE("pole on the axis") {
    CHECK_THROWS_WITH_AS(hinf_norm([](double w) { return std::isinf(w) ? 0.0 : 1.0 / std::abs(1.0 - w); },
                                   FrequencyGrid::log_spaced(0.5, 2.0, 3)),
                         "unbounded on axis", std::domain_error);
  }
}

TEST_CASE("step_response") {
  auto ss = [](const RationalTF& g) {
    const RationalTF row[] = {g};
    return tf_to_ss(row);
  };
  SUBCASE("first-order lag") {
    const auto r = step_response(ss(tf_make({1}, {1, 1})), 5.0, 0.01);
    CHECK(r.y.front() == 0.0);
    CHECK(r.t[100] == doctest::Approx(1.0));
    CHECK(std::abs(r.y[100] - (1.0 - std::exp(-1.0))) <= 1e-6);
  }
  SUBCASE("pure gain") {
    const auto r = step_response(ss(RationalTF::gain(1.0)), 1.0, 0.1);
    for (double y : r.y) CHECK(y == 1.0);
  }
  SUBCASE("integrator ramp") {
    const auto r = step_response(ss(tf_make({1}, {1, 0})), 3.0, 0.01);
    CHECK(std::abs(r.y[200] - 2.0) <= 1e-9);
  }
  SUBCASE("stable systems settle at the DC gain") {
    testing::Rng rng(4);
    for (int trial = 0; trial < 15; ++trial) {
      const auto g = testing::random_system(rng, 1 + static_cast<int>(rng.below(4)), false);
      double slowest = 1e300;
      for (const auto& p : g.poles()) slowest = std::min(slowest, std::abs(p.real()));
      const double t_end = 15.0 / slowest;
      const auto r = step_response(ss(g), t_end, t_end / 2000.0);
      CHECK(std::abs(r.y.back() - g.freq(0.0).value.real()) <= 1e-4 * std::max(1.0, std::abs(g.freq(0.0).value)));
    }
  }
  SUBCASE("bad arguments") { CHECK_THROWS_AS(step_response(ss(RationalTF::gain(1.0)), 1.0, 0.0), std::invalid_argument); }
}
