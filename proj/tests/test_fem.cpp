#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgap/fem.hpp"
#include "support/radial_oracle.hpp"

using namespace pgap;

namespace {

ConvexPolygon2D unit_square() { return ConvexPolygon2D::rectangle(1.0, 1.0); }

}  // namespace

TEST_CASE("weighted mean shift") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.1);
  std::vector<double> ux(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) ux[i] = mesh.nodes[i].x;
  // p = 2: the weighted mean
  CHECK(weighted_mean_shift(ux, Weight::constant(), 2.0, mesh) ==
        Catch::Approx(0.5).margin(1e-12));
  // p = 3, u = x, unit weight: |u - c|(u - c) is odd about the midpoint
  CHECK(weighted_mean_shift(ux, Weight::constant(), 3.0, mesh) ==
        Catch::Approx(0.5).margin(1e-10));
  // odd field about a symmetry axis with symmetric weight
  std::vector<double> uodd(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) uodd[i] = mesh.nodes[i].x - 0.5;
  CHECK(weighted_mean_shift(uodd, Weight::constant(), 2.5, mesh) ==
        Catch::Approx(0.0).margin(1e-10));
  std::vector<double> uconst(mesh.node_count(), 1.0);
  CHECK_THROWS_AS(weighted_mean_shift(uconst, Weight::constant(), 2.0, mesh), Error);
}

TEST_CASE("p = 2 on the unit square hits pi^2 within 0.2% at h = 0.02") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.02);
  const auto res = mu_2_fem(poly, Weight::constant(), mesh);
  CHECK(res.converged);
  CHECK(res.mu == Catch::Approx(kPi * kPi).epsilon(0.002));
  CHECK(res.constraint_residual < 1e-10);
  CHECK(res.residual < 1e-8);
}

TEST_CASE("thin rectangle keeps the pi^2 x-mode") {
  const auto poly = ConvexPolygon2D::rectangle(1.0, 0.1);
  const auto mesh = triangulate(poly, 0.02);
  const auto res = mu_2_fem(poly, Weight::constant(), mesh);
  CHECK(res.mu == Catch::Approx(kPi * kPi).epsilon(0.005));
}

TEST_CASE("disk eigenvalue matches the radial oracle after extrapolation") {
  const double reference = testsupport::disk_neumann_mu_radial();
  // first zero of J1' squared
  CHECK(reference == Catch::Approx(3.3899577166718887).epsilon(1e-10));
  const auto poly = ConvexPolygon2D::regular_ngon(64, 1.0);
  const auto r1 = mu_2_fem(poly, Weight::constant(), triangulate(poly, 0.08));
  const auto r2 = mu_2_fem(poly, Weight::constant(), triangulate(poly, 0.04));
  const double extrapolated = (4.0 * r2.mu - r1.mu) / 3.0;
  CHECK(extrapolated == Catch::Approx(reference).epsilon(0.005));
}

TEST_CASE("p = 2 conforming refinement is monotone and Richardson-stable") {
  const auto poly = unit_square();
  const auto w = Weight::constant();
  const double m1 = mu_2_fem(poly, w, triangulate(poly, 0.2)).mu;
  const double m2 = mu_2_fem(poly, w, triangulate(poly, 0.1)).mu;
  const double m3 = mu_2_fem(poly, w, triangulate(poly, 0.05)).mu;
  CHECK(m2 <= m1 + 1e-12);
  CHECK(m3 <= m2 + 1e-12);
  const double e1 = (4.0 * m2 - m1) / 3.0;
  const double e2 = (4.0 * m3 - m2) / 3.0;
  CHECK(std::abs(e1 - e2) / e2 < 1e-3);
}

TEST_CASE("first three eigenvalues of the square at p = 2") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.04);
  const auto eigs = mu_2_fem_spectrum(poly, Weight::constant(), mesh, 3);
  REQUIRE(eigs.size() == 3);
  // pi^2 (doubly degenerate) then 2 pi^2
  CHECK(eigs[0] == Catch::Approx(kPi * kPi).epsilon(0.01));
  CHECK(eigs[1] == Catch::Approx(kPi * kPi).epsilon(0.01));
  CHECK(eigs[2] == Catch::Approx(2.0 * kPi * kPi).epsilon(0.01));
}

TEST_CASE("mu_p_fem consistency and rigidity") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.05);
  const auto w = Weight::constant();
  const auto lin = mu_2_fem(poly, w, mesh);
  const auto gen = mu_p_fem(2.0, poly, w, mesh);
  CHECK(std::abs(gen.mu - lin.mu) / lin.mu < 1e-6);

  for (double p : {1.5, 3.0}) {
    const auto res = mu_p_fem(p, poly, w, mesh);
    INFO("p = " << p << " mu = " << res.mu);
    CHECK(res.converged);
    // rigidity: strictly above the Payne-Weinberger floor
    CHECK(res.mu > std::pow(pi_p(p) / poly.diameter(), p));
    // Kroger ceiling with m = 1
    CHECK(res.mu * std::pow(poly.diameter(), p) <= kroger_constant(p, 3));
    CHECK(res.constraint_residual < 1e-10);
  }
}

TEST_CASE("p = 3 on a thin rectangle stays at or below the 1D constant") {
  const double eps = 0.05;
  const auto poly = ConvexPolygon2D::rectangle(1.0, eps);
  const auto mesh = triangulate(poly, 0.02);
  const auto res = mu_p_fem(3.0, poly, Weight::constant(), mesh);
  CHECK(res.converged);
  CHECK(res.mu <= pi_p_pow(3.0) * 1.01);
  CHECK(res.mu > std::pow(pi_p(3.0) / poly.diameter(), 3.0));
}

TEST_CASE("weighted solve with an affine weight") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.05);
  const auto w = Weight::affine_power(1, 0, 0.1, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto res = (p == 2.0) ? mu_2_fem(poly, w, mesh) : mu_p_fem(p, poly, w, mesh);
    INFO("p = " << p);
    CHECK(res.mu > std::pow(pi_p(p) / poly.diameter(), p));
    const auto rep = linf_bound_check(res, poly, w, p, mesh);
    CHECK(rep.weighted);
    CHECK(rep.m_used == 1);
    CHECK(rep.margin.ln() > 0.0L);
  }
}

TEST_CASE("L^inf bound on the square: both sides explicit") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.02);
  const auto res = mu_2_fem(poly, Weight::constant(), mesh);
  const auto rep = linf_bound_check(res, poly, Weight::constant(), 2.0, mesh);
  // the first eigenvalue of the square is doubly degenerate; any unit
  // combination a cos(pi x) + b cos(pi y) has sup between sqrt2 and 2
  CHECK(rep.lhs >= std::sqrt(2.0) * 0.99);
  CHECK(rep.lhs <= 2.0 * 1.01);
  const double expected_rhs = k_infinity(2) * res.mu * 2.0;
  CHECK(rep.rhs.value() == Catch::Approx(expected_rhs).epsilon(1e-6));
  CHECK(rep.margin.ln() > 0.0L);
}

TEST_CASE("L^inf bound with a simple eigenfunction on a rectangle") {
  // (0,1)x(0,0.4): unique first mode sqrt(2/|Omega|) cos(pi x)
  const auto poly = ConvexPolygon2D::rectangle(1.0, 0.4);
  const auto mesh = triangulate(poly, 0.02);
  const auto res = mu_2_fem(poly, Weight::constant(), mesh);
  const auto rep = linf_bound_check(res, poly, Weight::constant(), 2.0, mesh);
  CHECK(rep.lhs == Catch::Approx(std::sqrt(2.0 / 0.4)).epsilon(0.01));
  CHECK(rep.margin.ln() > 0.0L);
}

TEST_CASE("L^inf bound accepts the gaussian weight through the slab exponent") {
  const auto poly = ConvexPolygon2D::regular_ngon(32, 1.0);
  const auto mesh = triangulate(poly, 0.1);
  const auto w = Weight::gaussian_y(2.0);
  const auto res = mu_2_fem(poly, w, mesh);
  const auto rep = linf_bound_check(res, poly, w, 2.0, mesh);
  CHECK(rep.m_used >= 7);  // ceil(2 n^2 ymax^2) with ymax close to 1
  CHECK(rep.margin.ln() > 0.0L);
}

TEST_CASE("verify_quantitative on the unit square") {
  const auto s = verify_quantitative(2.0, unit_square(), Weight::constant(), 1, 0.02);
  CHECK(s.D == Catch::Approx(std::sqrt(2.0)));
  CHECK(s.a2 == Catch::Approx(0.5).epsilon(1e-3));
  CHECK(s.deficit == Catch::Approx(kPi * kPi / 2.0).epsilon(0.01));
  CHECK(s.ratio == Catch::Approx(8.0 * kPi * kPi).epsilon(0.01));
  CHECK(s.above_floor);
  CHECK(s.ln_k0 < -1e30);
}

TEST_CASE("verify_quantitative refuses merely log-concave weights") {
  CHECK_THROWS_MATCHES(
      verify_quantitative(2.0, unit_square(), Weight::gaussian_y(2.0), 1, 0.05), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == ErrorCode::WrongConcavityClass;
      }));
  // mu_2_fem itself accepts it
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.1);
  CHECK_NOTHROW(mu_2_fem(poly, Weight::gaussian_y(2.0), mesh));
}

TEST_CASE("thin domains defer to the collapsed 1D model") {
  const double eps = 5e-4;
  const auto rect = ConvexPolygon2D::rectangle(1.0, eps);
  const auto res = mu_p_convex(2.0, rect, Weight::constant(), 0.05);
  CHECK(res.collapsed_1d);
  // constant section profile: the 1D eigenvalue pi^2 on the x-extent
  CHECK(res.mu == Catch::Approx(kPi * kPi).epsilon(1e-6));
  // a thin trapezoid still sits strictly above its Payne-Weinberger floor
  const auto trap = ConvexPolygon2D::validate(
      {{0, 0}, {1, 0}, {1, 4e-4}, {0, 2e-4}});
  const auto res2 = mu_p_convex(2.0, trap, Weight::constant(), 0.05);
  CHECK(res2.collapsed_1d);
  CHECK(res2.mu > std::pow(kPi / trap.diameter(), 2));
  // ordinary aspect ratios keep the FEM path
  const auto res3 = mu_p_convex(2.0, ConvexPolygon2D::rectangle(1.0, 0.3),
                                Weight::constant(), 0.05);
  CHECK(!res3.collapsed_1d);
}

TEST_CASE("verify_quantitative survives the collapsed regime") {
  const auto s = verify_quantitative(2.0, ConvexPolygon2D::rectangle(1.0, 5e-4),
                                     Weight::constant(), 1, 0.05);
  CHECK(s.deficit > 0.0);
  CHECK(s.above_floor);
  // closed form: ratio -> 4 pi^2 as eps -> 0
  CHECK(s.ratio == Catch::Approx(4.0 * kPi * kPi).epsilon(0.01));
}

TEST_CASE("random restarts agree on the square at p = 3") {
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.08);
  Fem2DOptions opt;
  opt.restarts = 3;
  const auto res = mu_p_fem(3.0, poly, Weight::constant(), mesh, opt);
  CHECK(res.converged);
  CHECK(res.restart_spread <= 1e-6 * res.mu);
}

TEST_CASE("weighted square w = x: the first mode is the pure y-mode at pi^2") {
  // -div(x grad u) = mu x u on (0,1)^2 separates: u = cos(pi y) satisfies it
  // with mu = pi^2, below the Bessel x-mode at 14.68
  const auto poly = unit_square();
  const auto mesh = triangulate(poly, 0.025);
  const auto res = mu_2_fem(poly, Weight::affine_power(1, 0, 0, 1), mesh);
  CHECK(res.mu == Catch::Approx(kPi * kPi).epsilon(0.004));
}
