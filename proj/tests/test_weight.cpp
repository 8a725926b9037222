#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgap/geometry.hpp"
#include "pgap/weight.hpp"

using namespace pgap;

TEST_CASE("pointwise evaluation per kind") {
  CHECK(Weight::constant(1.0)({0.3, -2.0}) == 1.0);
  CHECK(Weight::affine_power(1, 0, 0, 1)(0.25) == Catch::Approx(0.25));
  CHECK(Weight::gaussian_y(2.0)({0.0, 0.5}) == Catch::Approx(2.0 * std::exp(-1.0)));
  const auto prod = Weight::product({Weight::affine_power(1, 0, 0.5, 2),
                                     Weight::constant(3.0)});
  CHECK(prod(0.5) == Catch::Approx(3.0 * 1.0));
}

TEST_CASE("product evaluation equals product of factors (randomized)") {
  SeededRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double ax = rng.uniform() + 0.1, b = rng.uniform() + 0.5;
    const int m = 1 + int(rng.uniform() * 3);
    const double n = 0.5 + rng.uniform();
    const Weight f1 = Weight::affine_power(ax, 0.2, b, m);
    const Weight f2 = Weight::gaussian_y(n);
    const Weight f3 = Weight::constant(0.5 + rng.uniform());
    const Weight prod = Weight::product({f1, f2, f3});
    const Vec2 p{rng.uniform(), rng.uniform() - 0.5};
    CHECK(prod(p) == Catch::Approx(f1(p) * f2(p) * f3(p)).epsilon(1e-14));
  }
}

TEST_CASE("domain and positivity errors") {
  const auto w = Weight::affine_power(1, 0, 0, 1);  // x on x >= 0
  CHECK_THROWS_MATCHES(w(-0.5), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::OutsideDomain;
                       }));
  CHECK_THROWS_AS(Weight::constant(0.0), Error);
  CHECK_THROWS_AS(Weight::gaussian_y(-1.0), Error);
  CHECK_THROWS_AS(Weight::affine_power(1, 0, 0, 0), Error);
}

TEST_CASE("declared concavity classes") {
  CHECK(Weight::constant().concavity_class() == ConcavityClass::PowerConcave);
  CHECK(Weight::affine_power(1, 0, 0, 3).concavity_class() ==
        ConcavityClass::PowerConcave);
  CHECK(Weight::gaussian_y(2.0).concavity_class() == ConcavityClass::LogConcave);
  CHECK(*Weight::affine_power(1, 0, 0, 3).power_concavity_m() == 3);
  CHECK(!Weight::gaussian_y(2.0).power_concavity_m().has_value());
  const auto prod = Weight::product({Weight::affine_power(1, 0, 0.2, 2),
                                     Weight::affine_power(-1, 0, 1.2, 1)});
  CHECK(prod.concavity_class() == ConcavityClass::PowerConcave);
  CHECK(*prod.power_concavity_m() == 3);
  const auto mixed = Weight::product({Weight::gaussian_y(1.0), Weight::constant()});
  CHECK(mixed.concavity_class() == ConcavityClass::LogConcave);
}

TEST_CASE("slab power concavity of the gaussian family") {
  // n e^{-(ny)^2} has (e^{-n^2 y^2 / m}) concave on |y| <= 1 iff m >= 2 n^2
  const auto w = Weight::gaussian_y(4.0);
  const auto m = w.power_concavity_m_on(1.0);
  REQUIRE(m.has_value());
  CHECK(*m == 32);
  // numeric concavity check of w^(1/m) along y
  const double mm = double(*m);
  auto g = [&](double y) { return std::pow(w({0.0, y}), 1.0 / mm); };
  for (double y = -0.95; y <= 0.95; y += 0.05) {
    const double dd = g(y - 0.05) - 2.0 * g(y) + g(y + 0.05);
    CHECK(dd <= 1e-12);
  }
}

TEST_CASE("analytic 1d log derivative") {
  const auto w = Weight::affine_power(2.0, 0.0, 0.5, 3);
  // d/dx log (2x + 0.5)^3 = 6/(2x+0.5)
  CHECK(w.log_derivative_1d(0.25) == Catch::Approx(6.0).epsilon(1e-14));
  const auto prod = Weight::product({w, Weight::constant(2.0)});
  CHECK(prod.log_derivative_1d(0.25) == Catch::Approx(6.0).epsilon(1e-14));
  CHECK(Weight::constant().log_derivative_1d(0.1) == 0.0);
}
