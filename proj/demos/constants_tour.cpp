// The explicit constant chain, from pi_p down to the fully assembled K0.
// Everything below gamma lives in log space: K1 alone has ln ~ -1e37.

#include <cstdio>

#include "pgap/constants.hpp"
#include "pgap/onedim.hpp"

using namespace pgap;

int main() {
  const double p = 2.0;
  const int m = 1;
  const auto r = constants_report(p, m);
  std::printf("p = %g, m = %d\n", p, m);
  std::printf("pi_p = %.12g   (pi_p)^p = %.12g   d_p = %.12g\n", r.pi_p_value,
              r.pi_p_pow, r.d_p);
  std::printf("K_inf(2) = %.6g   beta = %.6g   kroger(p, N+m) = %g\n", r.k_inf,
              r.beta, r.kroger);
  std::printf("gamma = %.6g   kappa* = %.6g\n", r.gamma, r.kappa_star);
  std::printf("ln K1 = %.6g   K3 = %.6g\n", static_cast<double>(r.k1.ln()), r.k3);
  std::printf("ln K2 = %.6g   ln eta0 = %.6g   ln K0 = %.6g\n",
              static_cast<double>(r.k2.ln()), static_cast<double>(r.eta0.ln()),
              static_cast<double>(r.k0.ln()));

  // the refined 1D lower bound carries the same log-domain excess
  const auto rb =
      refined_lower_bound(p, m, 1.0, Weight::affine_power(1, 0, 0, 1), Weight::constant());
  std::printf("refined bound: base = %.6f, ln(excess) = %.6g\n", rb.base,
              static_cast<double>(rb.excess.ln()));
  return 0;
}
