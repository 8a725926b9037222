#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pgap/errors.hpp"
#include "pgap/logvalue.hpp"

namespace pgap {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// pi_p = 2 pi (p-1)^(1/p) / (p sin(pi/p)), the first positive zero of the
/// generalized p-sine. Gives the sharp one-dimensional Poincare constant
/// (pi_p/d)^p on an interval of length d.
inline double pi_p(double p) {
  if (!(p > 1.0))
    throw Error(ErrorCode::InvalidExponent, "pi_p requires p > 1");
  return 2.0 * kPi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(kPi / p));
}

inline double pi_p_pow(double p) { return std::pow(pi_p(p), p); }

/// ln d_p = -log1p((pi_p)^-p)/p. Kept in log form: for large p the value is
/// so close to 1 that the plain quotient rounds up to 1.0 exactly, while the
/// logarithm stays strictly negative.
inline double d_p_ln(double p) {
  return -std::log1p(1.0 / pi_p_pow(p)) / p;
}

/// d_p = pi_p / ((pi_p)^p + 1)^(1/p); the interval length below which the
/// Payne-Weinberger floor alone already exceeds (pi_p)^p + 1. Always in
/// (2/3, 1), strictly so in log space (see d_p_ln).
inline double d_p(double p) {
  return std::exp(d_p_ln(p));
}

/// Volume of the unit ball in R^N.
inline double unit_ball_volume(int N) {
  return std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

/// K_inf(N) = 2^(2N) w_N^-1 (1 + 4 N^(N+1))^N (N/(N-1))^(N(N-1)),
/// the dimensional constant of the L^inf eigenfunction estimate.
inline double k_infinity(int N) {
  if (N < 2) throw Error(ErrorCode::InvalidExponent, "k_infinity requires N >= 2");
  const double nn1 = 1.0 + 4.0 * std::pow(double(N), N + 1);
  return std::pow(2.0, 2 * N) / unit_ball_volume(N) * std::pow(nn1, N) *
         std::pow(double(N) / (N - 1.0), double(N) * (N - 1));
}

inline long double k_infinity_ln(int N) {
  if (N < 2) throw Error(ErrorCode::InvalidExponent, "k_infinity requires N >= 2");
  // ln(1 + 4 N^(N+1)); the direct power overflows long double near N ~ 1700
  const long double ln_pow = logl(4.0L) + (long double)(N + 1) * logl((long double)N);
  const long double ln_nn1 =
      (ln_pow > 60.0L) ? ln_pow : logl(1.0L + expl(ln_pow));
  const long double lnw = 0.5L * N * logl((long double)kPi) - lgammal(0.5L * N + 1.0L);
  return 2.0L * N * logl(2.0L) - lnw + (long double)N * ln_nn1 +
         (long double)N * (N - 1) * logl((long double)N / (N - 1));
}

/// Truncated infinite product beta(N,p) from the Moser iteration. Factors are
/// all >= 1; truncation when the tail bound sum_{k>K} k ln(delta) / delta^k
/// drops below tol.
inline double beta_product(int N, double p, double tol = 1e-15) {
  if (N < 2 || !(p > 1.0))
    throw Error(ErrorCode::InvalidExponent, "beta_product requires N >= 2, p > 1");
  const double delta = double(N) / (N - 1.0);
  const double r = 1.0 / delta;
  const double lnd = std::log(delta);
  double ln_beta = 0.0;
  for (int k = 0;; ++k) {
    const double qk_over_p = std::pow(delta, k);          // q_k / p
    const double denom = p * qk_over_p - p + 1.0;         // q_k - p + 1
    ln_beta += (1.0 / p) * std::pow(r, k) * (k * p * lnd - std::log(denom));
    // tail of sum_{j>k} j ln(delta) r^j, closed form
    const double tail =
        lnd * std::pow(r, k + 1) * ((k + 1) - k * r) / ((1.0 - r) * (1.0 - r));
    if (tail < tol && k >= 2) break;
    if (k > 100000) break;
  }
  return std::exp(ln_beta);
}

/// The p-dependent refinement of K_inf (always <= K_inf; not used in the
/// chain, exposed for the comparison checks).
inline double k_infinity_tilde(int N, double p) {
  const double wN = unit_ball_volume(N);
  const double c3 = (1.0 / N) * std::pow(wN, -1.0 / N) *
                    (1.0 + 4.0 * std::pow(double(N), N + 1));
  return std::pow(2.0, (p + 1.0) / p * N) * std::pow(double(N), N) *
         std::pow(c3, double(N) / p) * beta_product(N, p);
}

struct MoserConstants {
  double c2;     // Sobolev/BV embedding constant N^-1 w_N^(-1/N)
  double c3;     // c2 (1 + 4 N^(N+1))
  double c1;     // Moser iteration constant 2^(p+1) N^p c3
  double trace;  // trace lower bound 1/(4 N^(N+1))
};

inline MoserConstants moser_constants(int N, double p) {
  if (N < 2 || !(p > 1.0))
    throw Error(ErrorCode::InvalidExponent, "moser_constants requires N >= 2, p > 1");
  MoserConstants m{};
  m.c2 = (1.0 / N) * std::pow(unit_ball_volume(N), -1.0 / N);
  m.c3 = m.c2 * (1.0 + 4.0 * std::pow(double(N), N + 1));
  m.c1 = std::pow(2.0, p + 1.0) * std::pow(double(N), p) * m.c3;
  m.trace = 1.0 / (4.0 * std::pow(double(N), N + 1));
  return m;
}

/// gamma(p,m) = K_inf(m+1) ((pi_p)^p+1)^((m+1)/p) (int_0^1 min(x,1-x)^(m+1))^(-1/p)
/// with the integral equal to 2^-(m+1)/(m+2).
inline long double gamma_constant_ln(double p, int m) {
  if (!(p > 1.0) || m < 1)
    throw Error(ErrorCode::InvalidExponent, "gamma_constant requires p > 1, m >= 1");
  const long double ln_int = -(m + 1) * logl(2.0L) - logl((long double)(m + 2));
  return k_infinity_ln(m + 1) +
         (long double)(m + 1) / p * logl((long double)(pi_p_pow(p) + 1.0)) -
         (1.0L / p) * ln_int;
}

inline double gamma_constant(double p, int m) {
  return static_cast<double>(expl(gamma_constant_ln(p, m)));
}

struct B0M {
  LogValue b0;
  LogValue M;
};

/// b0 = min{ a/2, ((p-1)/(2p) s/t)^(p/(p-1)) } and the two-branch lower
/// bound M(p,a,s,t) of the rearrangement lemma, in log space.
inline B0M b0_and_m_log(double p, LogValue a, LogValue s, LogValue t) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidExponent, "b0_and_m requires p > 1");
  const long double ln2 = logl(2.0L);
  const long double pr = (long double)p / (p - 1.0);  // p/(p-1)
  const long double ln_ratio_coef = logl((long double)((p - 1.0) / (2.0 * p)));
  const long double b0_ln =
      std::min(a.ln() - ln2, pr * (ln_ratio_coef + s.ln() - t.ln()));
  const long double ln_pp = (p - 1.0) * logl((long double)((p - 1.0) / p));
  long double m_ln;
  if (p >= 2.0) {
    m_ln = -ln2 + ln_pp + (p - 1.0) * b0_ln + p * s.ln();
  } else {
    m_ln = ln_pp + std::min(2.0L * b0_ln - ln2, b0_ln - ln2 + pr * s.ln());
  }
  return {LogValue::from_ln(b0_ln), LogValue::from_ln(m_ln)};
}

/// Plain-value interface; overflows/underflows propagate to 0/inf.
inline B0M b0_and_m(double p, double a, double s, double t) {
  if (!(a > 0.0 && a < 1.0) || !(s > 0.0) || !(t > 0.0))
    throw Error(ErrorCode::InvalidExponent, "b0_and_m requires a in (0,1), s,t > 0");
  return b0_and_m_log(p, LogValue::from_value(a), LogValue::from_value(s),
                      LogValue::from_value(t));
}

/// Nonlinear Kroger-type constant (p+1) 2^((N+3p)/2) N^(N+p):
/// mu_p(Omega, phi) <= kroger(p, N+m) / D^p.
inline double kroger_constant(double p, int N) {
  if (N < 1 || !(p > 1.0))
    throw Error(ErrorCode::InvalidExponent, "kroger_constant requires N >= 1, p > 1");
  return (p + 1.0) * std::pow(2.0, 0.5 * (N + 3.0 * p)) * std::pow(double(N), N + p);
}

/// kappa* = (m+1) (2 gamma^p)^(m+2), the log-derivative bound at the
/// eigenfunction's zero. Returned as a long double since it can exceed the
/// double range on moderate (p, m).
inline long double kappa_star_ld(double p, int m) {
  const long double lng = gamma_constant_ln(p, m);
  const long double ln_ks =
      logl((long double)(m + 1)) + (m + 2) * (logl(2.0L) + p * lng);
  return expl(ln_ks);
}

/// The M of the chain: M(p, 1/(4 gamma^p), (4 gamma)^(-1/(p-1)),
/// (4 gamma^p)^(m+1) ((pi_p)^p + 1)).
inline LogValue k1_chain_M(double p, int m) {
  const long double lng = gamma_constant_ln(p, m);
  const long double ln4 = 2.0L * logl(2.0L);
  const double ppp1 = pi_p_pow(p) + 1.0;
  const LogValue a = LogValue::from_ln(-ln4 - p * lng);
  const LogValue s = LogValue::from_ln(-(1.0L / (p - 1.0)) * (ln4 + lng));
  const LogValue t =
      LogValue::from_ln((long double)(m + 1) * (ln4 + p * lng) + logl((long double)ppp1));
  return b0_and_m_log(p, a, s, t).M;
}

/// K1(p,m) per the refined 1D inequality; lives deep in the underflow range
/// (ln K1 ~ -1e37 already at p=2, m=1), hence LogValue.
inline LogValue k1_constant(double p, int m) {
  const long double lng = gamma_constant_ln(p, m);
  const LogValue M = k1_chain_M(p, m);
  const long double kappa_star = kappa_star_ld(p, m);
  const long double ln_k1 = -(1.0L / (p - 1.0)) * logl(2.0L) - 2.0L * kappa_star -
                            (long double)((2.0 * p * p - p) / (p - 1.0)) * lng +
                            M.ln();
  return LogValue::from_ln(ln_k1);
}

/// K3 = 1/(4 gamma^p).
inline double k3_constant(double p, int m) {
  return static_cast<double>(expl(-logl(4.0L) - p * gamma_constant_ln(p, m)));
}

/// K2(p, Ntot) = 2^-Ntot / (K_inf(Ntot)^p kroger(p,Ntot)^Ntot), the cell-area
/// control constant, evaluated at Ntot = N + m.
inline LogValue k2_constant(double p, int Ntot) {
  const long double ln_kinf = k_infinity_ln(Ntot);
  const long double ln_kroger = logl((long double)kroger_constant(p, Ntot));
  return LogValue::from_ln(-Ntot * logl(2.0L) - p * ln_kinf - Ntot * ln_kroger);
}

/// The whole explicit chain for Theorem-1-style checks at given (p, m, N).
/// K0 is assembled for N = 2 only; the ingredient functions accept general
/// arguments.
struct ConstantsReport {
  double p = 0.0;
  int N = 2;
  int m = 1;

  double pi_p_value = 0.0;
  double pi_p_pow = 0.0;   // (pi_p)^p
  double d_p = 0.0;
  double k_inf = 0.0;        // K_inf(N)
  double k_inf_tilde = 0.0;  // refined variant at (N, p)
  double beta = 0.0;         // beta(N, p)
  double trace_c = 0.0;      // 1/(4 N^(N+1))
  double c1_moser = 0.0;
  double c2_moser = 0.0;
  double c3_moser = 0.0;
  double gamma = 0.0;        // gamma(p, m); double overflow -> inf
  long double gamma_ln = 0.0L;
  double kappa_star = 0.0;   // double, inf when not representable
  long double kappa_star_ln = 0.0L;
  LogValue k1;
  double k3 = 0.0;
  double kroger = 0.0;       // evaluated at (p, N+m): the value used everywhere
  LogValue k2;               // at (p, N+m)
  LogValue eta0;
  LogValue c0;               // K2^2 / (2*256^2)
  LogValue k0;
};

inline ConstantsReport constants_report(double p, int m, int N = 2) {
  if (!(p > 1.0) || m < 1 || N < 2)
    throw Error(ErrorCode::InvalidExponent, "constants_report requires p > 1, m >= 1, N >= 2");
  ConstantsReport r;
  r.p = p;
  r.N = N;
  r.m = m;
  r.pi_p_value = pi_p(p);
  r.pi_p_pow = pgap::pi_p_pow(p);
  r.d_p = pgap::d_p(p);
  r.k_inf = k_infinity(N);
  r.k_inf_tilde = k_infinity_tilde(N, p);
  r.beta = beta_product(N, p);
  const MoserConstants mc = moser_constants(N, p);
  r.trace_c = mc.trace;
  r.c1_moser = mc.c1;
  r.c2_moser = mc.c2;
  r.c3_moser = mc.c3;
  r.gamma_ln = gamma_constant_ln(p, m);
  r.gamma = static_cast<double>(expl(r.gamma_ln));
  {
    const long double ks = kappa_star_ld(p, m);
    r.kappa_star_ln = logl(ks);
    r.kappa_star = static_cast<double>(ks);
  }
  r.k1 = k1_constant(p, m);
  r.k3 = k3_constant(p, m);
  r.kroger = kroger_constant(p, N + m);
  r.k2 = k2_constant(p, N + m);
  // eta0 = (1/2) sqrt(2 K1 / 3)
  r.eta0 = LogValue::from_ln(-logl(2.0L) +
                             0.5L * (logl(2.0L) + r.k1.ln() - logl(3.0L)));
  r.c0 = LogValue::from_ln(2.0L * r.k2.ln() - logl(2.0L) - 2.0L * logl(256.0L));
  // K0 = K1 K2^2 / (6 (7*16*256)^2)
  r.k0 = LogValue::from_ln(r.k1.ln() + 2.0L * r.k2.ln() - logl(6.0L) -
                           2.0L * logl(7.0L * 16.0L * 256.0L));
  return r;
}

struct ChainCheck {
  std::string name;
  bool pass = false;
  double detail_lhs = 0.0;  // typically lhs of "lhs <= rhs" in ln space
  double detail_rhs = 0.0;
};

/// Machine checks of the auxiliary inequalities the proofs assert, at one
/// (p, m, N) point.
inline std::vector<ChainCheck> chain_inequality_suite(double p, int m, int N = 2) {
  const ConstantsReport r = constants_report(p, m, N);
  std::vector<ChainCheck> out;
  auto push = [&out](const std::string& name, bool pass, double lhs, double rhs) {
    out.push_back({name, pass, lhs, rhs});
  };

  push("pi_p_pow > 2", r.pi_p_pow > 2.0, r.pi_p_pow, 2.0);
  push("ln d_p > ln(2/3)", d_p_ln(p) > std::log(2.0 / 3.0), d_p_ln(p),
       std::log(2.0 / 3.0));
  push("ln d_p < 0", d_p_ln(p) < 0.0, d_p_ln(p), 0.0);
  const double beta_cap = std::pow(double(N) / (N - 1.0), double(N) * (N - 1));
  push("beta <= (N/(N-1))^(N(N-1))", r.beta <= beta_cap, r.beta, beta_cap);
  push("beta >= 1", r.beta >= 1.0, r.beta, 1.0);
  push("k_inf_tilde <= k_inf", r.k_inf_tilde <= r.k_inf, r.k_inf_tilde, r.k_inf);
  push("gamma > 1", r.gamma_ln > 0.0L, static_cast<double>(r.gamma_ln), 0.0);
  {
    const LogValue M = k1_chain_M(p, m);
    push("chain M < 1", M.ln() < 0.0L, static_cast<double>(M.ln()), 0.0);
  }
  push("ln eta0 <= ln(1/6)", r.eta0.ln() <= logl(1.0L / 6.0L),
       static_cast<double>(r.eta0.ln()), std::log(1.0 / 6.0));
  push("ln eta0 <= ln(sqrt(35 K3)/24)",
       r.eta0.ln() <= 0.5L * logl(35.0L * (long double)r.k3) - logl(24.0L),
       static_cast<double>(r.eta0.ln()),
       static_cast<double>(0.5L * logl(35.0L * (long double)r.k3) - logl(24.0L)));
  push("ln K1 <= ln(1/6)", r.k1.ln() <= logl(1.0L / 6.0L),
       static_cast<double>(r.k1.ln()), std::log(1.0 / 6.0));
  push("ln K1 <= ln K3 - ln 4",
       r.k1.ln() <= logl((long double)r.k3) - logl(4.0L),
       static_cast<double>(r.k1.ln()), std::log(r.k3) - std::log(4.0));
  // K0 route A (definition) vs route B (K2^2 eta0^2 / (7*16*256)^2)
  {
    const long double routeB =
        2.0L * r.k2.ln() + 2.0L * r.eta0.ln() - 2.0L * logl(7.0L * 16.0L * 256.0L);
    const long double denom = std::max(1.0L, fabsl(r.k0.ln()));
    const long double rel = fabsl(r.k0.ln() - routeB) / denom;
    push("ln K0 == 2 ln K2 + 2 ln eta0 - 2 ln(7*16*256)", rel <= 1e-12L,
         static_cast<double>(r.k0.ln()), static_cast<double>(routeB));
  }
  // Lemma-1 constant K2^2/(8*256)^2 equals c0/32
  {
    const long double lemma1 = 2.0L * r.k2.ln() - 2.0L * logl(8.0L * 256.0L);
    const long double viaC0 = r.c0.ln() - logl(32.0L);
    const long double rel = fabsl(lemma1 - viaC0) / std::max(1.0L, fabsl(lemma1));
    push("K2^2/(8*256)^2 == c0/32", rel <= 1e-12L, static_cast<double>(lemma1),
         static_cast<double>(viaC0));
  }
  return out;
}

} // namespace pgap
