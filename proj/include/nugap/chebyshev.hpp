#pragma once

#include <array>
#include <vector>

#include "nugap/rational.hpp"

namespace nugap::proto {

using lti::ExtendedComplex;

using Point3 = std::array<double, 3>;

/// Stereographic image on the Riemann sphere of diameter 1 resting on the
/// origin; chordal distance between images equals kappa.
Point3 to_sphere(const ExtendedComplex& z);
ExtendedComplex from_sphere(const Point3& p);

struct Ball {
  Point3 center{0.0, 0.0, 0.0};
  double radius = -1.0;
};

/// Smallest enclosing ball of a point set (Welzl, move-to-front).
Ball min_enclosing_ball(const std::vector<Point3>& points);

struct ChebyshevPoint {
  ExtendedComplex h;
  /// max_i kappa(h, values[i]).
  double radius = 0.0;
  /// Set when the points do not fit in an open hemisphere and the plane
  /// search from the chordal centroid was used instead of the cap centre.
  bool fallback = false;
};

/// Minimizer of max_i kappa(h, values[i]): centre of the smallest spherical
/// cap holding the projected values, then a Nelder-Mead polish in the plane.
ChebyshevPoint chebyshev_point(const std::vector<ExtendedComplex>& values);

}  // namespace nugap::proto
