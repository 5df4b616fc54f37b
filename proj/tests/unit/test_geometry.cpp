#include <doctest.h>

#include "ltb/geometry.hpp"

using namespace ltb;

TEST_CASE("monotone geodesic constants") {
  GenParams p;
  p.n = 64;
  PointSpace line = generate("uniform-line", p);
  GeodesicProfile gl = monotone_geodesic_constant(line, default_u_grid(line));
  CHECK(gl.pass);
  CHECK(gl.overall <= 1.5);

  GenParams g;
  g.h = 0.05;
  PointSpace gap = generate("line-with-gap", g);
  CHECK(monotone_geodesic_constant(gap, {0.1}).C[0] >= 10.0);

  PointSpace tri = generate("triangle-edges", GenParams{});
  CHECK(!monotone_geodesic_constant(tri, default_u_grid(tri)).pass);
}

TEST_CASE("annular decay on the line") {
  GenParams p;
  p.n = 128;
  PointSpace line = generate("uniform-line", p);
  GeometryOptions opt;
  opt.centers = 8;
  DecayProfile a = annular_decay(line, opt, true);
  CHECK(a.fit.eta >= 0.2);
}

TEST_CASE("normalized hardy exponents") {
  GenParams p;
  p.n = 64;
  PointSpace line = generate("uniform-line", p);
  CHECK_THROWS_AS(normalized_hardy_ball(line, 32, 0.125, 2.0, 2.0), InvalidArgument);
  NormEstimate e = normalized_hardy_ball(line, 32, 0.125, 3.0, 3.0, 200);
  CHECK(std::isfinite(e.value));
  CHECK(e.value > 0.0);
}

TEST_CASE("ball hardy regions") {
  GenParams p;
  p.n = 65;
  PointSpace line = generate("uniform-line", p);
  BallHardy b = hardy_ball(line, 32, 0.125, 2.0);
  CHECK(b.inner == static_cast<int>(line.ball(32, 0.125).size()));
  CHECK(b.outer == static_cast<int>(line.ball(32, 0.25).size()) - b.inner);
}

TEST_CASE("restriction embedding") {
  GenParams full;
  full.n = 61;
  full.h = 0.05;
  PointSpace X = generate("uniform-line", full);
  GenParams g;
  g.h = 0.05;
  PointSpace sub = generate("line-with-gap", g);
  std::vector<int> e = embed_by_coordinates(X, sub);
  REQUIRE(e.size() == static_cast<std::size_t>(sub.size()));
  for (int i = 0; i < sub.size(); ++i) CHECK(std::abs(X.coords()(e[i], 0) - sub.coords()(i, 0)) < 1e-9);
}
