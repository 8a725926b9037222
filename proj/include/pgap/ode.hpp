#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "pgap/errors.hpp"

namespace pgap {

/// Adaptive Dormand-Prince RK5(4) for small first-order systems.
template <int N>
struct OdeResult {
  std::array<double, N> y{};
  double max_error_estimate = 0.0;  // largest accepted scaled local error
  long steps = 0;
};

template <int N, class Rhs, class Observer>
OdeResult<N> integrate_dopri5(Rhs&& rhs, double t0, double t1,
                              std::array<double, N> y0, double rtol, double atol,
                              Observer&& observe) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  using State = std::array<double, N>;
  auto axpy = [](State& out, const State& base, double h,
                 std::initializer_list<std::pair<double, const State*>> terms) {
    for (int i = 0; i < N; ++i) {
      double s = base[i];
      for (auto& [coef, k] : terms) s += h * coef * (*k)[i];
      out[i] = s;
    }
  };

  OdeResult<N> res;
  State y = y0;
  double t = t0;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double h = dir * std::max(1e-10, std::abs(t1 - t0) / 100.0);
  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  rhs(t, y, k1);
  observe(t, y);
  const long max_steps = 40'000'000L;
  while (dir * (t1 - t) > 0.0) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    axpy(ytmp, y, h, {{a21, &k1}});
    rhs(t + c2 * h, ytmp, k2);
    axpy(ytmp, y, h, {{a31, &k1}, {a32, &k2}});
    rhs(t + c3 * h, ytmp, k3);
    axpy(ytmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(t + c4 * h, ytmp, k4);
    axpy(ytmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(t + c5 * h, ytmp, k5);
    axpy(ytmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(t + h, ytmp, k6);
    axpy(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      observe(t, y);
      res.max_error_estimate = std::max(res.max_error_estimate, err);
      if (++res.steps > max_steps)
        throw Error(ErrorCode::SolverDidNotConverge, "ODE step budget exceeded");
    }
    const double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
      throw Error(ErrorCode::SolverDidNotConverge, "ODE step size underflow");
  }
  res.y = y;
  return res;
}

template <int N, class Rhs>
OdeResult<N> integrate_dopri5(Rhs&& rhs, double t0, double t1,
                              std::array<double, N> y0, double rtol = 1e-12,
                              double atol = 1e-14) {
  return integrate_dopri5<N>(std::forward<Rhs>(rhs), t0, t1, y0, rtol, atol,
                             [](double, const std::array<double, N>&) {});
}

} // namespace pgap
