#pragma once

// Radial shooting reference for the first nontrivial Neumann eigenvalue of
// the unit disk: eigenfunction J1(sqrt(mu) r) cos(theta), so mu is the square
// of the first zero of J1'. Independent of the 2D FEM path; used to pin the
// disk anchor in tests.

#include <array>
#include <cmath>

#include "pgap/ode.hpp"

namespace testsupport {

inline double disk_neumann_mu_radial(double rtol = 1e-12) {
  auto v_end = [&](double mu) {
    auto rhs = [mu](double r, const std::array<double, 2>& y, std::array<double, 2>& dy) {
      dy[0] = y[1];
      dy[1] = -y[1] / r + y[0] / (r * r) - mu * y[0];
    };
    // series start u = r - mu r^3/8 + mu^2 r^5/192 keeps the 1/r terms tame
    const double r0 = 1e-4;
    const double u0 = r0 - mu * r0 * r0 * r0 / 8.0;
    const double v0 = 1.0 - 3.0 * mu * r0 * r0 / 8.0;
    auto res = pgap::integrate_dopri5<2>(rhs, r0, 1.0, {u0, v0}, rtol, 1e-14);
    return res.y[1];
  };
  double lo = 1.0, hi = 9.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (v_end(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace testsupport
