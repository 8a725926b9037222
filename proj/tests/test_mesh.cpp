#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pgap/geometry.hpp"
#include "pgap/mesh.hpp"

using namespace pgap;

TEST_CASE("unit square mesh quality") {
  const auto poly = ConvexPolygon2D::rectangle(1.0, 1.0);
  const auto mesh = triangulate(poly, 0.1);
  CHECK(mesh.min_angle_deg >= 20.0);
  CHECK(mesh.area == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(mesh.realized_h <= 0.1 * std::sqrt(2.0) * 1.0001);
  for (double a : {0.0, 1.0}) {
    (void)a;  // corners present as nodes
  }
}

TEST_CASE("thin rectangle gets at least 4 layers across the short side") {
  const double eps = 0.01;
  const auto mesh = triangulate(ConvexPolygon2D::rectangle(1.0, eps), 0.1);
  // effective spacing across the short side <= eps/4
  double min_dy = 1e300;
  double max_y = 0.0;
  for (const auto& n : mesh.nodes) max_y = std::max(max_y, n.y);
  std::vector<double> ys;
  for (const auto& n : mesh.nodes)
    if (std::abs(n.x) < 1e-12) ys.push_back(n.y);
  std::sort(ys.begin(), ys.end());
  for (size_t i = 1; i < ys.size(); ++i) min_dy = std::min(min_dy, ys[i] - ys[i - 1]);
  CHECK(ys.size() >= 5);  // >= 4 layers
  CHECK(min_dy <= eps / 4.0 + 1e-12);
  CHECK(mesh.min_angle_deg >= 20.0);
}

TEST_CASE("node cap raises MeshBudgetExceeded") {
  CHECK_THROWS_MATCHES(triangulate(ConvexPolygon2D::rectangle(1.0, 1.0), 1e-4, 1000),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::MeshBudgetExceeded;
                       }));
}

TEST_CASE("general polygons: hexagon and 64-gon") {
  for (int ngon : {6, 64}) {
    const auto poly = ConvexPolygon2D::regular_ngon(ngon, 1.0);
    const auto mesh = triangulate(poly, 0.15);
    INFO("ngon " << ngon << " min angle " << mesh.min_angle_deg);
    CHECK(mesh.min_angle_deg >= 20.0);
    CHECK(mesh.area == Catch::Approx(poly.area()).epsilon(1e-9));
    // conforming: all triangle areas positive
    for (int t = 0; t < mesh.tri_count(); ++t) CHECK(mesh.tri_area(t) > 0.0);
  }
}

TEST_CASE("random polygon meshes are conforming and well shaped") {
  for (int seed = 0; seed < 12; ++seed) {
    const auto poly = random_convex_polygon(400 + seed, 10 + seed);
    const auto mesh = triangulate(poly, 0.05);
    INFO("seed " << seed << " min angle " << mesh.min_angle_deg);
    CHECK(mesh.min_angle_deg >= 20.0);
    CHECK(mesh.area == Catch::Approx(poly.area()).epsilon(1e-9));
    CHECK(mesh.node_count() > 50);
  }
}

TEST_CASE("structured refinement is nested") {
  const auto poly = ConvexPolygon2D::rectangle(1.0, 1.0);
  const auto coarse = triangulate(poly, 0.25);
  const auto fine = triangulate(poly, 0.125);
  // every coarse node appears among fine nodes
  int found = 0;
  for (const auto& cn : coarse.nodes)
    for (const auto& fn : fine.nodes)
      if (std::abs(cn.x - fn.x) < 1e-14 && std::abs(cn.y - fn.y) < 1e-14) {
        ++found;
        break;
      }
  CHECK(found == coarse.node_count());
}

TEST_CASE("h precondition") {
  CHECK_THROWS_AS(triangulate(ConvexPolygon2D::rectangle(1.0, 1.0), 2.0), Error);
  CHECK_THROWS_AS(triangulate(ConvexPolygon2D::rectangle(1.0, 1.0), -0.1), Error);
}

TEST_CASE("node cap on the general meshing path") {
  const auto hex = ConvexPolygon2D::regular_ngon(6, 1.0);
  CHECK_THROWS_MATCHES(triangulate(hex, 0.01, 500), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::MeshBudgetExceeded;
                       }));
}

TEST_CASE("meshing is deterministic") {
  const auto poly = random_convex_polygon(77, 14);
  const auto m1 = triangulate(poly, 0.05);
  const auto m2 = triangulate(poly, 0.05);
  REQUIRE(m1.node_count() == m2.node_count());
  REQUIRE(m1.tri_count() == m2.tri_count());
  for (int i = 0; i < m1.node_count(); ++i) {
    CHECK(m1.nodes[i].x == m2.nodes[i].x);
    CHECK(m1.nodes[i].y == m2.nodes[i].y);
  }
  for (int t = 0; t < m1.tri_count(); ++t) CHECK(m1.triangles[t] == m2.triangles[t]);
}
