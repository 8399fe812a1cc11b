#include "nugap/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <list>
#include <stdexcept>

#include <Eigen/Dense>

#include "nugap/metric.hpp"

namespace nugap::proto {

namespace {

using Vec3 = Eigen::Vector3d;

Vec3 vec(const Point3& p) { return {p[0], p[1], p[2]}; }
Point3 pt(const Vec3& v) { return {v[0], v[1], v[2]}; }

constexpr double kBallSlack = 1e-12;

bool contains(const Ball& b, const Vec3& p) {
  return b.radius >= 0.0 && (p - vec(b.center)).norm() <= b.radius + kBallSlack;
}

Ball ball_through(const std::vector<Vec3>& s);

// Smallest ball of a tiny set, by brute force over sub-supports. Used when
// the exact circumscribed ball is degenerate.
Ball smallest_over_subsets(const std::vector<Vec3>& s) {
  Ball best;
  const std::size_t k = s.size();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<Vec3> sub;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) sub.push_back(s[i]);
    }
    if (sub.size() == k) continue;
    const Ball b = ball_through(sub);
    if (b.radius < 0.0) continue;
    if (!std::all_of(s.begin(), s.end(), [&](const Vec3& p) { return contains(b, p); })) continue;
    if (best.radius < 0.0 || b.radius < best.radius) best = b;
  }
  return best;
}

// Ball with all points of s on its boundary.
Ball ball_through(const std::vector<Vec3>& s) {
  switch (s.size()) {
    case 0: return {};
    case 1: return {pt(s[0]), 0.0};
    case 2: return {pt(0.5 * (s[0] + s[1])), 0.5 * (s[0] - s[1]).norm()};
    case 3: {
      const Vec3 u = s[1] - s[0], v = s[2] - s[0];
      Eigen::Matrix2d G;
      G << u.dot(u), u.dot(v), u.dot(v), v.dot(v);
      if (std::abs(G.determinant()) <= 1e-14 * (G.norm() * G.norm() + 1e-300)) return smallest_over_subsets(s);
      const Eigen::Vector2d st = G.fullPivLu().solve(Eigen::Vector2d(0.5 * u.dot(u), 0.5 * v.dot(v)));
      const Vec3 c = s[0] + st[0] * u + st[1] * v;
      return {pt(c), (c - s[0]).norm()};
    }
    case 4: {
      Eigen::Matrix3d A;
      Eigen::Vector3d rhs;
      for (int i = 0; i < 3; ++i) {
        const Vec3 di = s[static_cast<std::size_t>(i + 1)] - s[0];
        A.row(i) = 2.0 * di.transpose();
        rhs[i] = di.squaredNorm();
      }
      if (std::abs(A.determinant()) <= 1e-14 * std::pow(A.norm(), 3)) return smallest_over_subsets(s);
      const Vec3 c = s[0] + A.fullPivLu().solve(rhs);
      return {pt(c), (c - s[0]).norm()};
    }
    default: throw std::logic_error("ball_through: support larger than 4");
  }
}

// Gaertner's move-to-front variant of Welzl's recursion.
Ball mtf_ball(std::list<Vec3>& pts, std::list<Vec3>::iterator end, std::vector<Vec3>& support) {
  Ball b = ball_through(support);
  if (support.size() == 4) return b;
  for (auto it = pts.begin(); it != end;) {
    auto cur = it++;
    if (contains(b, *cur)) continue;
    support.push_back(*cur);
    b = mtf_ball(pts, cur, support);
    support.pop_back();
    pts.splice(pts.begin(), pts, cur);
  }
  return b;
}

double max_kappa(const ExtendedComplex& h, const std::vector<ExtendedComplex>& values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, metric::kappa(h, v));
  return m;
}

// Nelder-Mead over R^2 for a max-type objective.
std::pair<Eigen::Vector2d, double> nelder_mead(const std::function<double(const Eigen::Vector2d&)>& f,
                                               const Eigen::Vector2d& x0, double step, int max_iter) {
  std::array<Eigen::Vector2d, 3> x{x0, x0 + Eigen::Vector2d(step, 0.0), x0 + Eigen::Vector2d(0.0, step)};
  std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[static_cast<std::size_t>(a)] < fx[static_cast<std::size_t>(b)]; });
    const auto bi = static_cast<std::size_t>(order[0]);
    const auto mi = static_cast<std::size_t>(order[1]);
    const auto wi = static_cast<std::size_t>(order[2]);
    if (std::abs(fx[wi] - fx[bi]) <= 1e-15 && (x[wi] - x[bi]).norm() <= 1e-13 * (1.0 + x[bi].norm())) break;
    const Eigen::Vector2d centroid = 0.5 * (x[bi] + x[mi]);
    const Eigen::Vector2d xr = centroid + (centroid - x[wi]);
    const double fr = f(xr);
    if (fr < fx[bi]) {
      const Eigen::Vector2d xe = centroid + 2.0 * (centroid - x[wi]);
      const double fe = f(xe);
      if (fe < fr) {
        x[wi] = xe;
        fx[wi] = fe;
      } else {
        x[wi] = xr;
        fx[wi] = fr;
      }
    } else if (fr < fx[mi]) {
      x[wi] = xr;
      fx[wi] = fr;
    } else {
      const Eigen::Vector2d xc = centroid + 0.5 * (x[wi] - centroid);
      const double fc = f(xc);
      if (fc < fx[wi]) {
        x[wi] = xc;
        fx[wi] = fc;
      } else {
        for (std::size_t k : {mi, wi}) {
          x[k] = x[bi] + 0.5 * (x[k] - x[bi]);
          fx[k] = f(x[k]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (fx[k] < fx[best]) best = k;
  }
  return {x[best], fx[best]};
}

}  // namespace

Point3 to_sphere(const ExtendedComplex& z) {
  if (z.infinite) return {0.0, 0.0, 1.0};
  const double r2 = std::norm(z.value);
  const double s = 1.0 / (1.0 + r2);
  return {z.value.real() * s, z.value.imag() * s, r2 * s};
}

ExtendedComplex from_sphere(const Point3& p) {
  const double below = 1.0 - p[2];
  if (below <= 1e-300) return ExtendedComplex::infinity();
  return ExtendedComplex::finite(lti::Complex{p[0], p[1]} / below);
}

Ball min_enclosing_ball(const std::vector<Point3>& points) {
  std::list<Vec3> pts;
  for (const auto& p : points) pts.push_back(vec(p));
  std::vector<Vec3> support;
  return mtf_ball(pts, pts.end(), support);
}

ChebyshevPoint chebyshev_point(const std::vector<ExtendedComplex>& values) {
  if (values.empty()) throw std::invalid_argument("chebyshev_point of an empty set");

  std::vector<Point3> pts;
  for (const auto& v : values) pts.push_back(to_sphere(v));
  const Ball ball = min_enclosing_ball(pts);
  const Vec3 pole_centre(0.0, 0.0, 0.5);
  const Vec3 dir = vec(ball.center) - pole_centre;

  ChebyshevPoint out;
  bool in_hemisphere = dir.norm() > 1e-12;
  if (in_hemisphere) {
    const Vec3 u = dir.normalized();
    for (const auto& p : pts) {
      if (u.dot(vec(p) - pole_centre) <= 0.0) in_hemisphere = false;
    }
  }
  if (in_hemisphere || ball.radius == 0.0) {
    const Vec3 c = ball.radius == 0.0 ? vec(ball.center) : Vec3(pole_centre + 0.5 * dir.normalized());
    out.h = from_sphere(pt(c));
  } else {
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : pts) centroid += vec(p);
    centroid /= static_cast<double>(pts.size());
    const Vec3 off = centroid - pole_centre;
    out.h = off.norm() > 1e-12 ? from_sphere(pt(pole_centre + 0.5 * off.normalized())) : values.front();
    out.fallback = true;
  }
  out.radius = max_kappa(out.h, values);
  if (out.radius == 0.0) return out;

  // Polish in z, or in w = 1/z near infinity; inversion is a rotation of the
  // sphere, so both charts see the same objective.
  const bool inverted = out.h.infinite || std::abs(out.h.value) > 1.0;
  auto decode = [inverted](const Eigen::Vector2d& x) {
    const lti::Complex w{x[0], x[1]};
    if (!inverted) return ExtendedComplex::finite(w);
    if (w == lti::Complex{0.0}) return ExtendedComplex::infinity();
    return ExtendedComplex::finite(1.0 / w);
  };
  const lti::Complex start = inverted ? (out.h.infinite ? lti::Complex{0.0} : 1.0 / out.h.value) : out.h.value;
  const auto [x, fx] = nelder_mead([&](const Eigen::Vector2d& x) { return max_kappa(decode(x), values); },
                                   Eigen::Vector2d(start.real(), start.imag()),
                                   std::max(1e-3, 0.1 * out.radius) * (1.0 + std::abs(start)), 400);
  if (fx < out.radius) {
    out.h = decode(x);
    out.radius = fx;
  }
  return out;
}

}  // namespace nugap::proto
