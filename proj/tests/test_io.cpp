#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "pgap/io.hpp"

using namespace pgap;

TEST_CASE("polygon json round trip") {
  const auto poly = ConvexPolygon2D::rectangle(1.0, 0.5);
  const auto j = polygon_to_json(poly);
  const auto back = polygon_from_json(j);
  REQUIRE(back.size() == poly.size());
  for (size_t i = 0; i < poly.size(); ++i) {
    CHECK(back.vertices()[i].x == poly.vertices()[i].x);
    CHECK(back.vertices()[i].y == poly.vertices()[i].y);
  }
  CHECK_THROWS_AS(polygon_from_json(ojson{{"nope", 1}}), Error);
}

TEST_CASE("weight json round trip for every kind") {
  const Weight cases[] = {
      Weight::constant(2.5),
      Weight::affine_power(1.0, -0.5, 0.25, 3),
      Weight::gaussian_y(4.0),
      Weight::product({Weight::affine_power(1, 0, 0.2, 1), Weight::gaussian_y(2.0)}),
  };
  for (const auto& w : cases) {
    const auto j = weight_to_json(w);
    const auto back = weight_from_json(j);
    for (double x : {0.1, 0.4, 0.9})
      for (double y : {-0.3, 0.0, 0.2})
        CHECK(back({x, y}) == Catch::Approx(w({x, y})).epsilon(1e-14));
  }
  CHECK_THROWS_AS(weight_from_json(ojson{{"kind", "mystery"}}), Error);
  // tagged union documents the declared class
  CHECK(weight_to_json(Weight::gaussian_y(1.0))["concavity"] == "log_concave");
  CHECK(weight_to_json(Weight::affine_power(1, 0, 0, 2))["concavity"] ==
        "power_concave(1/2)");
}

TEST_CASE("constants report json carries ln and linear values") {
  const auto j = constants_report_to_json(constants_report(2.0, 1, 2));
  CHECK(j["pi_p_pow"].get<double>() == Catch::Approx(kPi * kPi));
  CHECK(j["k1"]["ln"].get<double>() < -1e30);
  CHECK(j["k1"]["value"].is_null());
  CHECK(j["k2"]["value"].is_number());
  CHECK(j["kroger_at_N_plus_m"].get<double>() ==
        Catch::Approx(kroger_constant(2.0, 3)));
  CHECK(j["k0"]["ln"].get<double>() < -1e30);
}

TEST_CASE("csv is deterministic and carries the contract columns") {
  DeficitSample s;
  s.seed = 42;
  s.p = 2.0;
  s.D = 1.0;
  s.a1 = 0.4;
  s.a2 = 0.21;
  s.width = 0.45;
  s.mu = 11.0;
  s.deficit = 11.0 - kPi * kPi;
  s.ratio = s.deficit / (0.21 * 0.21);
  s.residual = 1e-10;
  const auto csv1 = samples_to_csv({s, s});
  const auto csv2 = samples_to_csv({s, s});
  CHECK(csv1 == csv2);
  CHECK(csv1.rfind("seed,p,D,a1,a2,width,mu,deficit,ratio,residual,status\n", 0) == 0);
  CHECK(csv1.find("42,2,1,0.4,0.21,0.45,11,") != std::string::npos);
}

TEST_CASE("svg scatter is self-contained") {
  std::vector<DeficitSample> samples;
  for (int i = 0; i < 50; ++i) {
    DeficitSample s;
    s.a2 = 0.1 + 0.005 * i;
    s.ratio = 6.0 + i;
    s.shape_id = i ? "random" : "square";
    samples.push_back(s);
  }
  const auto svg = scatter_svg(samples, "test");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);  // no external assets
  CHECK(svg.size() < 1024 * 1024);
}

TEST_CASE("experiment report json schema") {
  ExperimentReport rep;
  rep.name = "demo";
  rep.parameters = {{"p", "2"}};
  rep.fits.push_back({"slope", 2.0, 1e-3});
  rep.checks.push_back({"slope ok", true, 2.0, 0.05});
  rep.finish_checks();
  const auto j = experiment_report_to_json(rep, 2.0, 1);
  CHECK(j["schema_version"] == "1");
  CHECK(j["library_version"] == std::string(kVersion));
  CHECK(j["constants"]["k0"]["ln"].get<double>() < -1e30);
  CHECK(j["tolerances"].contains("shoot_rtol"));
  CHECK(j["pass"] == true);
}
