#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgap/constants.hpp"
#include "pgap/onedim.hpp"

using namespace pgap;

namespace {
// first zero of J1 (= first zero of J0'), squared: the f(x) = x, p = 2
// eigenvalue on (0,1)
constexpr double kBesselNeumannSq = 14.681970642123893;
}  // namespace

TEST_CASE("shooting reproduces the optimal 1D constant") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const auto r = mu_p_1d_shoot(p, 1.0, Weight::constant());
    INFO("p = " << p);
    CHECK(r.mu == Catch::Approx(pi_p_pow(p)).epsilon(1e-8));
    CHECK(r.sign_changes == 1);
    CHECK(r.zero_crossing > 0.0);
    CHECK(r.zero_crossing < 1.0);
    CHECK(r.orthogonality_defect < 1e-6);
  }
}

TEST_CASE("shooting scales like d^-p") {
  const auto r = mu_p_1d_shoot(2.0, 0.5, Weight::constant());
  CHECK(r.mu == Catch::Approx(4.0 * kPi * kPi).epsilon(1e-8));
}

TEST_CASE("weight f(x) = x gives the Bessel eigenvalue") {
  const auto r = mu_p_1d_shoot(2.0, 1.0, Weight::affine_power(1, 0, 0, 1));
  CHECK(r.mu == Catch::Approx(kBesselNeumannSq).epsilon(1e-5));
  CHECK(r.floored_weight);  // vanishing endpoint reported
  CHECK(r.sign_changes == 1);
  const auto oracle = mu_p_1d_rayleigh(2.0, 1.0, Weight::affine_power(1, 0, 0, 1), 4096);
  CHECK(std::abs(r.mu - oracle.value) / r.mu < 5e-3);
}

TEST_CASE("rayleigh oracle hits the known spectrum") {
  const auto r2 = mu_p_1d_rayleigh(2.0, 1.0, Weight::constant(), 1024);
  CHECK(r2.value == Catch::Approx(kPi * kPi).epsilon(1e-4));
  const auto r3 = mu_p_1d_rayleigh(3.0, 1.0, Weight::constant(), 1024);
  CHECK(r3.value == Catch::Approx(pi_p_pow(3.0)).epsilon(1e-3));
  CHECK_THROWS_AS(mu_p_1d_rayleigh(2.0, 1.0, Weight::constant(), 8), Error);
}

TEST_CASE("conforming discretization upper-bounds the infimum") {
  const auto shoot = mu_p_1d_shoot(2.5, 1.0, Weight::affine_power(0.8, 0, 0.2, 1));
  const auto ray = mu_p_1d_rayleigh(2.5, 1.0, Weight::affine_power(0.8, 0, 0.2, 1), 2048);
  CHECK(ray.value >= shoot.mu - 1e-6 * shoot.mu);
}

TEST_CASE("oracle agreement on assorted log-concave weights") {
  struct Case {
    double p;
    Weight f;
  };
  const Case cases[] = {
      {1.5, Weight::constant()},
      {2.0, Weight::affine_power(0.5, 0, 0.5, 1)},
      {3.0, Weight::affine_power(1.0, 0, 0.2, 2)},
  };
  for (const auto& c : cases) {
    const auto s = mu_p_1d_shoot(c.p, 1.0, c.f);
    const auto r = mu_p_1d_rayleigh(c.p, 1.0, c.f, 4096);
    INFO("p = " << c.p << " f = " << c.f.describe());
    CHECK(std::abs(s.mu - r.value) / s.mu < 5e-3);
  }
}

TEST_CASE("monotone decreasing in the interval length") {
  double prev = 1e300;
  for (double d : {0.6, 0.8, 1.0, 1.2, 1.5}) {
    const auto r = mu_p_1d_shoot(2.5, d, Weight::constant());
    CHECK(r.mu < prev);
    prev = r.mu;
  }
}

TEST_CASE("Payne-Weinberger floor for normalized log-concave weights") {
  for (double p : {1.5, 2.0, 3.0}) {
    // sup-normalized affine weight on (0,1)
    const auto f = Weight::affine_power(0.8, 0, 0.2, 1);
    const auto r = mu_p_1d_shoot(p, 1.0, f);
    CHECK(r.mu >= std::pow(pi_p(p), p) - 1e-8);
  }
}

TEST_CASE("invalid exponents") {
  CHECK_THROWS_AS(mu_p_1d_shoot(1.0, 1.0, Weight::constant()), Error);
  CHECK_THROWS_AS(mu_p_1d_shoot(2.0, -1.0, Weight::constant()), Error);
}

TEST_CASE("refined lower bound: constant h has no excess") {
  const auto rb = refined_lower_bound(2.0, 1, 1.0, Weight::constant(),
                                      Weight::constant());
  CHECK(rb.excess.is_zero());
  CHECK(rb.base == Catch::Approx(kPi * kPi).epsilon(1e-14));
  CHECK(rb.total.value() == Catch::Approx(rb.base).epsilon(1e-12));
}

TEST_CASE("refined lower bound for h(x) = x stays below the true eigenvalue") {
  const auto h = Weight::affine_power(1, 0, 0, 1);
  const auto rb = refined_lower_bound(2.0, 1, 1.0, h, Weight::constant());
  // excess = (2/3) K1 (1/(1-K3))^2 in log space
  const auto k1 = k1_constant(2.0, 1);
  const double k3 = k3_constant(2.0, 1);
  const long double expected =
      logl(2.0L / 3.0L) + k1.ln() + 2.0L * logl(1.0L / (1.0L - (long double)k3));
  CHECK(static_cast<double>(rb.excess.ln()) ==
        Catch::Approx(static_cast<double>(expected)).epsilon(1e-10));
  const auto mu = mu_p_1d_shoot(2.0, 1.0, h);
  CHECK(static_cast<double>(rb.total.ln()) < std::log(mu.mu));
}

TEST_CASE("refined lower bound preconditions") {
  // d below d_p is a contract violation
  CHECK_THROWS_AS(
      refined_lower_bound(2.0, 1, 0.5, Weight::constant(), Weight::constant()),
      Error);
  // h must be concave: a squared affine is not
  CHECK_THROWS_MATCHES(
      refined_lower_bound(2.0, 1, 1.0, Weight::affine_power(1, 0, 0.1, 2),
                          Weight::constant()),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == ErrorCode::WrongConcavityClass;
      }));
  // phi must be (1/m)-concave with declared exponent <= m
  CHECK_THROWS_MATCHES(
      refined_lower_bound(2.0, 1, 1.0, Weight::constant(),
                          Weight::affine_power(1, 0, 0.1, 3)),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == ErrorCode::WrongConcavityClass;
      }));
}

TEST_CASE("higher 1D modes via sign-change targeting") {
  Shoot1DOptions opt;
  opt.max_mode = 2;
  const auto r2 = mu_p_1d_shoot(2.0, 1.0, Weight::constant(), opt);
  CHECK(r2.mu == Catch::Approx(4.0 * kPi * kPi).epsilon(1e-7));
  CHECK(r2.sign_changes == 2);
  opt.max_mode = 3;
  const auto r3 = mu_p_1d_shoot(2.0, 1.0, Weight::constant(), opt);
  CHECK(r3.mu == Catch::Approx(9.0 * kPi * kPi).epsilon(1e-7));
}

TEST_CASE("refined bound dominated by the eigenvalue when the hypothesis holds") {
  // gentle slope: mu_p(I, h phi) stays below (pi_p)^p + 1
  const auto h = Weight::affine_power(0.1, 0, 0.55, 1);
  const auto mu = mu_p_1d_shoot(2.0, 1.0, h);
  REQUIRE(mu.mu <= pi_p_pow(2.0) + 1.0);
  const auto rb = refined_lower_bound(2.0, 1, 1.0, h, Weight::constant());
  CHECK(static_cast<double>(rb.total.ln()) <= std::log(mu.mu));
  CHECK(!rb.excess.is_zero());
  CHECK(rb.min_log_deriv_sq > 0.0);
}

TEST_CASE("refined bound on a shorter interval") {
  const double d = 0.96;  // above d_p(2) ~ 0.9529
  const auto h = Weight::affine_power(0.1, 0, 0.6, 1);
  const auto mu = mu_p_1d_shoot(2.0, d, h);
  const double hyp = std::pow(pi_p(2.0) / d, 2.0) + std::pow(d, -2.0);
  REQUIRE(mu.mu <= hyp);
  const auto rb = refined_lower_bound(2.0, 1, d, h, Weight::constant());
  CHECK(rb.base == Catch::Approx(std::pow(pi_p(2.0) / d, 2.0)).epsilon(1e-12));
  CHECK(static_cast<double>(rb.total.ln()) <= std::log(mu.mu));
}
