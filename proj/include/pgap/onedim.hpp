#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pgap/constants.hpp"
#include "pgap/errors.hpp"
#include "pgap/logvalue.hpp"
#include "pgap/ode.hpp"
#include "pgap/weight.hpp"

namespace pgap {

/// First nontrivial eigenvalue of the weighted 1D Neumann p-Laplacian on
/// (0, d): -(f |u'|^(p-2) u')' = mu f |u|^(p-2) u, u'(0) = u'(d) = 0.
struct Eig1DResult {
  double mu = 0.0;
  double zero_crossing = 0.0;    // unique zero of the eigenfunction
  std::vector<double> grid;      // uniform sample points
  std::vector<double> profile;   // eigenfunction values, u(0) = 1
  double residual = 0.0;         // max scaled local error of the integrator
  double boundary_defect = 0.0;  // |u'(d)| at the accepted mu
  double orthogonality_defect = 0.0;  // |int f |u|^(p-2) u| / int f |u|^(p-1)
  int sign_changes = 1;
  bool floored_weight = false;   // weight hit the evaluation floor (vanishing endpoint)
  double tolerance = 0.0;        // integrator tolerance used
};

struct Shoot1DOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  int profile_points = 2049;
  int max_mode = 1;  // which eigenvalue (1 = first nontrivial)
};

namespace detail1d {

struct ShotOutcome {
  double w_end = 0.0;
  int sign_changes = 0;
  double max_err = 0.0;
};

// sgn(t) |t|^e, the odd power
inline double odd_pow(double t, double e) {
  if (t == 0.0) return 0.0;
  const double a = std::pow(std::abs(t), e);
  return t > 0.0 ? a : -a;
}

template <class WeightFn>
ShotOutcome shoot_once(double p, double d, WeightFn&& f, double floor, double mu,
                       double rtol, double atol,
                       std::vector<double>* grid = nullptr,
                       std::vector<double>* profile = nullptr,
                       double* zero_out = nullptr) {
  const double inv_pm1 = 1.0 / (p - 1.0);
  auto rhs = [&](double x, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    const double fx = std::max(f(x), floor);
    const double w = y[1];
    double q = std::abs(w) / fx;
    if (q < 1e-300) q = 0.0;  // branch floor near the flux zero
    dy[0] = (w >= 0.0 ? 1.0 : -1.0) * std::pow(q, inv_pm1);
    dy[1] = -mu * fx * odd_pow(y[0], p - 1.0);
  };

  ShotOutcome out;
  double last_u = 1.0;
  double last_x = 0.0;
  double zero = -1.0;
  int crossings = 0;
  auto observer = [&](double x, const std::array<double, 2>& y) {
    if (y[0] == 0.0 || (y[0] > 0.0) != (last_u > 0.0)) {
      if (last_u != y[0]) {
        ++crossings;
        if (crossings == 1)
          zero = last_x + (x - last_x) * last_u / (last_u - y[0]);
      }
    }
    last_u = y[0];
    last_x = x;
  };

  if (profile) {
    // integrate segment by segment so the grid values are exact states
    const int n = static_cast<int>(grid->size());
    std::array<double, 2> y{1.0, 0.0};
    double maxerr = 0.0;
    last_u = 1.0;
    last_x = 0.0;
    profile->resize(n);
    (*profile)[0] = 1.0;
    for (int i = 1; i < n; ++i) {
      auto r = integrate_dopri5<2>(rhs, (*grid)[i - 1], (*grid)[i], y, rtol, atol, observer);
      y = r.y;
      maxerr = std::max(maxerr, r.max_error_estimate);
      (*profile)[i] = y[0];
    }
    out.w_end = y[1];
    out.max_err = maxerr;
  } else {
    auto r = integrate_dopri5<2>(rhs, 0.0, d, {1.0, 0.0}, rtol, atol, observer);
    out.w_end = r.y[1];
    out.max_err = r.max_error_estimate;
  }
  out.sign_changes = crossings;
  if (zero_out) *zero_out = zero;
  return out;
}

} // namespace detail1d

/// Shooting solver: bisection on mu of the flux boundary defect, bracketed
/// between a quarter of the Payne-Weinberger floor and the Kroger ceiling.
/// For the k-th eigenvalue the predicate counts sign changes of u. The
/// callable overload also serves collapsed section profiles of thin domains.
inline Eig1DResult mu_p_1d_shoot_fn(double p, double d,
                                    const std::function<double(double)>& f,
                                    int kroger_m, const Shoot1DOptions& opt = {}) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "mu_p_1d_shoot requires p > 1");
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidExponent, "interval length must be positive");
  const int mode = std::max(1, opt.max_mode);

  // weight floor relative to the grid sup; flags vanishing-endpoint weights
  double fmax = 0.0, fmin = std::numeric_limits<double>::infinity();
  const int kProbe = 4096;
  for (int i = 0; i <= kProbe; ++i) {
    const double v = f(d * i / kProbe);
    if (!(v >= 0.0))
      throw Error(ErrorCode::NonIntegrable, "weight negative on the interval");
    fmax = std::max(fmax, v);
    fmin = std::min(fmin, v);
  }
  if (!(fmax > 0.0))
    throw Error(ErrorCode::NonIntegrable, "weight vanishes identically");
  const double floor = 1e-12 * fmax;
  const bool floored = fmin <= floor;

  auto weight_fn = [&f](double x) { return f(x); };

  // The terminal flux w(d) crosses zero with alternating direction at
  // consecutive eigenvalues, so the "past the k-th eigenvalue" predicate
  // flips parity with k.
  auto above = [&](double mu, detail1d::ShotOutcome* keep = nullptr) {
    auto s = detail1d::shoot_once(p, d, weight_fn, floor, mu, opt.rtol, opt.atol);
    if (keep) *keep = s;
    const bool flux_past = (mode % 2 == 1) ? (s.w_end >= 0.0) : (s.w_end <= 0.0);
    return s.sign_changes > mode || (s.sign_changes == mode && flux_past);
  };

  const double pw_floor = std::pow(pi_p(p) / d, p);
  double lo = 0.25 * pw_floor * std::pow(double(mode), p);
  for (int guard = 0; guard < 60 && above(lo); ++guard) lo *= 0.5;
  if (above(lo))
    throw Error(ErrorCode::BracketFailure, "no lower bracket for mu");

  double hi = kroger_constant(p, 1 + kroger_m) / std::pow(d, p);
  hi *= std::pow(double(mode), p) * 2.0;
  {
    int guard = 0;
    while (!above(hi)) {
      hi *= 1.6;
      if (++guard > 200)
        throw Error(ErrorCode::BracketFailure, "no upper bracket for mu");
    }
  }

  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid))
      hi = mid;
    else
      lo = mid;
  }
  const double mu = 0.5 * (lo + hi);

  Eig1DResult res;
  res.mu = mu;
  res.tolerance = opt.rtol;
  res.floored_weight = floored;
  res.grid.resize(opt.profile_points);
  for (int i = 0; i < opt.profile_points; ++i)
    res.grid[i] = d * i / (opt.profile_points - 1);
  double zero = -1.0;
  auto fin = detail1d::shoot_once(p, d, weight_fn, floor, mu, opt.rtol, opt.atol,
                                  &res.grid, &res.profile, &zero);
  res.sign_changes = fin.sign_changes;
  res.zero_crossing = zero;
  res.residual = fin.max_err * opt.rtol;
  res.boundary_defect =
      std::pow(std::abs(fin.w_end) / std::max(f(d), floor), 1.0 / (p - 1.0));

  // weighted orthogonality of the p-mean: int f |u|^(p-2) u  (Simpson)
  {
    double num = 0.0, den = 0.0;
    const int n = opt.profile_points;  // odd by default
    for (int i = 0; i < n; ++i) {
      const double wgt = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double fx = f(res.grid[i]);
      num += wgt * fx * detail1d::odd_pow(res.profile[i], p - 1.0);
      den += wgt * fx * std::pow(std::abs(res.profile[i]), p - 1.0);
    }
    res.orthogonality_defect = std::abs(num) / std::max(den, 1e-300);
  }
  return res;
}

inline Eig1DResult mu_p_1d_shoot(double p, double d, const Weight& f,
                                 const Shoot1DOptions& opt = {}) {
  const auto m_decl = f.power_concavity_m();
  auto fn = [&f](double x) { return f(x); };
  return mu_p_1d_shoot_fn(p, d, fn, m_decl ? *m_decl : 3, opt);
}

struct Rayleigh1DResult {
  double value = 0.0;
  int iterations = 0;
  bool stalled = false;
  std::vector<double> u;  // nodal minimizer, shifted and normalized
};

namespace detail1d {

// Scalar shift c making sum_j w_j f_j |u_j - c|^(p-2) (u_j - c) = 0;
// the map is strictly decreasing in c, so bisection always lands.
inline double mean_shift_1d(const std::vector<double>& u, const std::vector<double>& fw,
                            double p) {
  double lo = u[0], hi = u[0];
  for (double v : u) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return lo;
  auto g = [&](double c) {
    double s = 0.0;
    for (size_t j = 0; j < u.size(); ++j) s += fw[j] * odd_pow(u[j] - c, p - 1.0);
    return s;
  };
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (std::abs(hi) + std::abs(lo) + 1.0);
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace detail1d

/// Discretized Rayleigh-quotient minimum over piecewise-linear fields on a
/// uniform n-interval grid, by preconditioned projected descent with the
/// scalar-shift constraint. Independent oracle for the shooting solver.
inline Rayleigh1DResult mu_p_1d_rayleigh(double p, double d, const Weight& f, int n) {
  if (n < 16) throw Error(ErrorCode::InvalidExponent, "mu_p_1d_rayleigh requires n >= 16");
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "requires p > 1");
  const double h = d / n;
  std::vector<double> fmid(n), fnode(n + 1), wnode(n + 1);
  for (int i = 0; i < n; ++i) fmid[i] = f((i + 0.5) * h);
  for (int j = 0; j <= n; ++j) {
    fnode[j] = f(j * h);
    wnode[j] = (j == 0 || j == n) ? 0.5 * h : h;
  }
  std::vector<double> fw(n + 1);
  for (int j = 0; j <= n; ++j) fw[j] = wnode[j] * fnode[j];

  auto shift_and_normalize = [&](std::vector<double>& u) {
    const double c = detail1d::mean_shift_1d(u, fw, p);
    double den = 0.0;
    for (int j = 0; j <= n; ++j) {
      u[j] -= c;
      den += fw[j] * std::pow(std::abs(u[j]), p);
    }
    const double s = std::pow(den, -1.0 / p);
    for (auto& v : u) v *= s;
  };

  auto quotient = [&](const std::vector<double>& u, double* den_out = nullptr) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
      num += fmid[i] * std::pow(std::abs(u[i + 1] - u[i]) / h, p) * h;
    for (int j = 0; j <= n; ++j) den += fw[j] * std::pow(std::abs(u[j]), p);
    if (den_out) *den_out = den;
    return num / den;
  };

  std::vector<double> u(n + 1);
  for (int j = 0; j <= n; ++j) u[j] = std::cos(kPi * j * h / d);
  shift_and_normalize(u);
  double R = quotient(u);

  std::vector<double> grad(n + 1), diag(n + 1), off(n), rhsv(n + 1), step(n + 1);
  Rayleigh1DResult out;
  const int max_iter = 4000;
  int calm = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    // gradient of num - R * den (den normalized to 1)
    for (int j = 0; j <= n; ++j)
      grad[j] = -p * R * fw[j] * detail1d::odd_pow(u[j], p - 1.0);
    for (int i = 0; i < n; ++i) {
      const double slope = (u[i + 1] - u[i]) / h;
      const double t = p * fmid[i] * detail1d::odd_pow(slope, p - 1.0);
      grad[i] -= t;
      grad[i + 1] += t;
    }
    // tridiagonal preconditioner: linearized p-Laplacian + mass
    const double delta2 = 1e-16;
    for (int j = 0; j <= n; ++j) diag[j] = p * fw[j];
    for (int i = 0; i < n; ++i) {
      const double slope = (u[i + 1] - u[i]) / h;
      const double coef =
          p * fmid[i] * std::pow(slope * slope + delta2, 0.5 * (p - 2.0)) / h;
      diag[i] += coef;
      diag[i + 1] += coef;
      off[i] = -coef;
    }
    // Thomas solve (diag, off) * step = grad
    {
      std::vector<double>& cp = rhsv;
      cp = grad;
      std::vector<double> dd = diag, oo = off;
      for (int i = 1; i <= n; ++i) {
        const double w = oo[i - 1] / dd[i - 1];
        dd[i] -= w * oo[i - 1];
        cp[i] -= w * cp[i - 1];
      }
      step[n] = cp[n] / dd[n];
      for (int i = n - 1; i >= 0; --i) step[i] = (cp[i] - off[i] * step[i + 1]) / dd[i];
    }
    double t = 1.0;
    bool improved = false;
    std::vector<double> trial(n + 1);
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (int j = 0; j <= n; ++j) trial[j] = u[j] - t * step[j];
      shift_and_normalize(trial);
      const double Rt = quotient(trial);
      if (Rt < R) {
        const double rel = (R - Rt) / std::max(R, 1e-300);
        u.swap(trial);
        R = Rt;
        improved = true;
        calm = (rel < 1e-11) ? calm + 1 : 0;
        break;
      }
    }
    if (!improved) ++calm;
    if (calm >= 3) break;
  }
  out.value = R;
  out.iterations = it;
  out.stalled = (it >= max_iter);
  out.u = std::move(u);
  return out;
}

/// Refined lower bound of the 1D inequality: (pi_p/d)^p plus the excess
/// (2/3) K1 min_{[K3, d-K3]} (h'/h)^2, carried in log space since K1
/// underflows every float format.
struct RefinedBound {
  double base = 0.0;        // (pi_p/d)^p
  LogValue excess;          // (2/3) K1 min (h'/h)^2
  LogValue total;           // base + excess in log space
  double min_log_deriv_sq = 0.0;
  double sup_f = 0.0;       // sup of h*phi before normalization
  bool interval_too_short = false;
};

inline RefinedBound refined_lower_bound(double p, int m, double d, const Weight& h,
                                        const Weight& phi) {
  if (!(p > 1.0) || m < 1)
    throw Error(ErrorCode::InvalidExponent, "refined_lower_bound requires p > 1, m >= 1");
  const double dp = d_p(p);
  if (d < dp || d > 1.0)
    throw Error(ErrorCode::InvalidExponent,
                "refined_lower_bound requires d in [d_p, 1], got d = " + std::to_string(d));
  const auto hm = h.power_concavity_m();
  if (!hm || *hm != 1)
    throw Error(ErrorCode::WrongConcavityClass, "h must be concave (affine or constant)");
  const auto pm = phi.power_concavity_m();
  if (!pm || *pm > m)
    throw Error(ErrorCode::WrongConcavityClass,
                "phi must be (1/m)-concave with declared exponent <= m");

  RefinedBound rb;
  rb.base = std::pow(pi_p(p) / d, p);

  const int kGrid = 10000;
  double sup = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = d * i / kGrid;
    sup = std::max(sup, h(x) * phi(x));
  }
  rb.sup_f = sup;  // the bound itself is scale invariant in h

  const double k3 = k3_constant(p, m);
  if (d < 2.0 * k3) {
    rb.interval_too_short = true;
    rb.excess = LogValue::zero();
    rb.total = LogValue::from_value(rb.base);
    return rb;
  }
  double minq = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double x = k3 + (d - 2.0 * k3) * i / kGrid;
    const double q = h.log_derivative_1d(x);
    minq = std::min(minq, q * q);
  }
  rb.min_log_deriv_sq = minq;
  const LogValue k1 = k1_constant(p, m);
  rb.excess = (minq > 0.0)
                  ? LogValue::from_ln(logl(2.0L / 3.0L) + k1.ln() +
                                      logl((long double)minq))
                  : LogValue::zero();
  rb.total = LogValue::from_value(rb.base) + rb.excess;
  return rb;
}

} // namespace pgap
