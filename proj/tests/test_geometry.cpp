#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgap/constants.hpp"
#include "pgap/geometry.hpp"
#include "support/john_grid_oracle.hpp"

using namespace pgap;

namespace {

ConvexPolygon2D unit_square() {
  return ConvexPolygon2D::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST_CASE("polygon_validate reorders clockwise input") {
  const auto poly = ConvexPolygon2D::validate({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(poly.area() == Catch::Approx(1.0));
  // counterclockwise after validation
  const auto& v = poly.vertices();
  double signed2 = 0.0;
  for (size_t i = 0; i < v.size(); ++i) signed2 += v[i].cross(v[(i + 1) % v.size()]);
  CHECK(signed2 > 0.0);
}

TEST_CASE("polygon_validate rejects bad input") {
  CHECK_THROWS_MATCHES(ConvexPolygon2D::validate({{0, 0}, {1, 1}}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::TooFewVertices;
                       }));
  CHECK_THROWS_MATCHES(ConvexPolygon2D::validate({{0, 0}, {1, 1}, {2, 2}}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::Degenerate;
                       }));
  // reflex quadrilateral
  CHECK_THROWS_MATCHES(
      ConvexPolygon2D::validate({{0, 0}, {2, 0}, {0.2, 0.2}, {0, 2}}), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return e.code() == ErrorCode::NonConvex; }));
  CHECK_NOTHROW(ConvexPolygon2D::regular_ngon(6));
}

TEST_CASE("thin rectangles down to eps = 1e-4 validate") {
  CHECK_NOTHROW(ConvexPolygon2D::rectangle(1.0, 1e-4));
}

TEST_CASE("diameter") {
  CHECK(unit_square().diameter() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const double eps = 0.05;
  CHECK(ConvexPolygon2D::rectangle(1.0, eps).diameter() ==
        Catch::Approx(std::sqrt(1.0 + eps * eps)).epsilon(1e-14));
  // regular hexagon of side 1: brute-force pair scan equals 2
  const auto hex = ConvexPolygon2D::regular_ngon(6, 1.0);
  double brute = 0.0;
  for (const auto& a : hex.vertices())
    for (const auto& b : hex.vertices()) brute = std::max(brute, (a - b).norm());
  CHECK(hex.diameter() == Catch::Approx(brute));
  CHECK(hex.diameter() == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("diameter scales with similarities") {
  SeededRng rng(911);
  for (int trial = 0; trial < 25; ++trial) {
    const auto poly = random_convex_polygon(1000 + trial, 12);
    const double s = 0.2 + 3.0 * rng.uniform();
    const double th = 6.28 * rng.uniform();
    const Vec2 t{rng.uniform(), rng.uniform()};
    std::vector<Vec2> mapped;
    for (const auto& v : poly.vertices())
      mapped.push_back({t.x + s * (std::cos(th) * v.x - std::sin(th) * v.y),
                        t.y + s * (std::sin(th) * v.x + std::cos(th) * v.y)});
    const auto image = ConvexPolygon2D::validate(mapped);
    CHECK(image.diameter() == Catch::Approx(s * poly.diameter()).epsilon(1e-12));
  }
}

TEST_CASE("width") {
  CHECK(unit_square().width() == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(ConvexPolygon2D::rectangle(1.0, 0.01).width() ==
        Catch::Approx(0.01).epsilon(1e-14));
  const auto tri =
      ConvexPolygon2D::validate({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
  CHECK(tri.width() == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("width at most diameter on random polygons") {
  for (int seed = 0; seed < 40; ++seed) {
    const auto poly = random_convex_polygon(seed, 3 + seed % 20);
    CHECK(poly.width() <= poly.diameter() + 1e-12);
  }
}

TEST_CASE("john ellipse of the centered square is the unit disk") {
  const auto sq = ConvexPolygon2D::validate({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto e = john_ellipse(sq);
  CHECK(e.a1 == Catch::Approx(1.0).margin(2e-4));
  CHECK(e.a2 == Catch::Approx(1.0).margin(2e-4));
  CHECK(e.center.x == Catch::Approx(0.0).margin(1e-4));
  CHECK(e.center.y == Catch::Approx(0.0).margin(1e-4));
}

TEST_CASE("john ellipse of a thin rectangle") {
  const double eps = 0.01;
  const auto e = john_ellipse(ConvexPolygon2D::rectangle(1.0, eps));
  CHECK(e.a1 == Catch::Approx(0.5).epsilon(2e-3));
  CHECK(e.a2 == Catch::Approx(eps / 2.0).epsilon(2e-3));
  CHECK(e.center.x == Catch::Approx(0.5).margin(1e-3));
  CHECK(e.center.y == Catch::Approx(eps / 2.0).margin(1e-5));
}

TEST_CASE("john ellipse of the equilateral triangle matches the grid oracle") {
  const auto tri =
      ConvexPolygon2D::validate({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
  const auto e = john_ellipse(tri);
  // Steiner inellipse of an equilateral triangle: the incircle, r = 1/(2 sqrt 3)
  const double r = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(e.a1 == Catch::Approx(r).epsilon(3e-3));
  CHECK(e.a2 == Catch::Approx(r).epsilon(3e-3));
  const auto oracle = testsupport::john_grid_search(tri);
  CHECK(e.area() == Catch::Approx(oracle.area()).epsilon(2e-2));
  CHECK(oracle.a1 == Catch::Approx(r).epsilon(3e-2));
}

TEST_CASE("john containment pair on sampled polygons") {
  for (int seed = 0; seed < 20; ++seed) {
    const auto poly = random_convex_polygon(7000 + seed, 4 + seed);
    const auto e = john_ellipse(poly);
    REQUIRE(e.a1 >= e.a2);
    REQUIRE(e.a2 > 0.0);
    const double scale = poly.diameter();
    double worst_in = 0.0, worst_out = 0.0;
    for (int k = 0; k < 360; ++k) {
      const double t = 2.0 * kPi * k / 360.0;
      const Vec2 dir{std::cos(t), std::sin(t)};
      const double hp = poly.support(dir);
      const double he = e.support(dir);
      // ellipse inside polygon
      worst_in = std::max(worst_in, he - hp);
      // polygon inside the ellipse dilated by 2 about its center
      const double h2e = e.center.dot(dir) + 2.0 * (he - e.center.dot(dir));
      worst_out = std::max(worst_out, hp - h2e);
    }
    INFO("seed " << seed);
    CHECK(worst_in <= 1e-6 * scale);
    CHECK(worst_out <= 1e-6 * scale);
    // two-dimensional comparability: 2 a2 <= width <= 4 a2
    const double w = poly.width();
    CHECK(2.0 * e.a2 <= w * (1.0 + 1e-5));
    CHECK(w <= 4.0 * e.a2 * (1.0 + 1e-5));
    CHECK(w <= poly.diameter());
  }
}

TEST_CASE("random polygons are deterministic, unit diameter, valid") {
  const auto a = random_convex_polygon(7, 20);
  const auto b = random_convex_polygon(7, 20);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.vertices()[i].x == b.vertices()[i].x);
    CHECK(a.vertices()[i].y == b.vertices()[i].y);
  }
  for (int seed = 0; seed < 30; ++seed) {
    const auto poly = random_convex_polygon(seed, 16);
    CHECK(poly.diameter() == Catch::Approx(1.0).margin(1e-12));
    CHECK_NOTHROW(ConvexPolygon2D::validate(poly.vertices()));
  }
  const auto c = random_convex_polygon(8, 20);
  CHECK(c.vertices()[0].x != a.vertices()[0].x);
}

TEST_CASE("vertical depth of simple shapes") {
  CHECK(unit_square().vertical_depth() == Catch::Approx(1.0));
  CHECK(ConvexPolygon2D::rectangle(1.0, 0.25).vertical_depth() == Catch::Approx(0.25));
  const auto tri = ConvexPolygon2D::validate({{0, 0}, {1, 0}, {0.5, 0.7}});
  CHECK(tri.vertical_depth() == Catch::Approx(0.7));
}

TEST_CASE("john ellipse of an extreme-aspect rectangle") {
  const double eps = 1e-4;
  const auto e = john_ellipse(ConvexPolygon2D::rectangle(1.0, eps));
  CHECK(e.a1 == Catch::Approx(0.5).epsilon(5e-3));
  CHECK(e.a2 == Catch::Approx(eps / 2.0).epsilon(5e-3));
}
