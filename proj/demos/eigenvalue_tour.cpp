// Library walkthrough: build a domain, pick a weight, solve the weighted
// Neumann p-Laplacian eigenproblem, and check the attached bounds.

#include <cstdio>

#include "pgap/fem.hpp"

using namespace pgap;

int main() {
  const auto hexagon = ConvexPolygon2D::regular_ngon(6, 0.5);
  const auto weight = Weight::affine_power(1.0, 0.0, 0.6, 1);  // (x + 0.6)

  const Mesh mesh = triangulate(hexagon, 0.03);
  std::printf("mesh: %d nodes, %d triangles, min angle %.1f deg\n",
              mesh.node_count(), mesh.tri_count(), mesh.min_angle_deg);

  for (double p : {1.5, 2.0, 3.0}) {
    const auto res = (p == 2.0) ? mu_2_fem(hexagon, weight, mesh)
                                : mu_p_fem(p, hexagon, weight, mesh);
    const double floor = std::pow(pi_p(p) / hexagon.diameter(), p);
    const auto linf = linf_bound_check(res, hexagon, weight, p, mesh);
    std::printf("p = %.1f  mu = %.6f  PW floor = %.6f  L^inf ln-margin = %.1f\n",
                p, res.mu, floor, static_cast<double>(linf.margin.ln()));
  }

  const auto sample = verify_quantitative(2.0, hexagon, weight, 1, 0.03);
  std::printf("deficit = %.4f  ratio = %.3f  ln(ratio) - ln(K0) = %.3g\n",
              sample.deficit, sample.ratio, sample.ln_ratio - sample.ln_k0);
  return 0;
}
