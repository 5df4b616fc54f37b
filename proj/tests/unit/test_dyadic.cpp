#include <doctest.h>

#include "ltb/dyadic.hpp"

using namespace ltb;

namespace {

PointSpace integers(int n) {
  GenParams p;
  p.n = n;
  p.h = 1.0;
  return generate("uniform-line", p);
}

}  // namespace

TEST_CASE("generation-1 cubes of the integer line") {
  PointSpace s = integers(8);
  DyadicTree t = build_tree(s, 0.5);
  REQUIRE(t.generations.size() > 1);
  REQUIRE(t.generations[1].size() == 2);
  const Cube& A = t.cube(t.generations[1][0]);
  const Cube& B = t.cube(t.generations[1][1]);
  CHECK(A.members == std::vector<int>{0, 1, 2});
  CHECK(B.members == std::vector<int>{3, 4, 5, 6, 7});
  CHECK(set_distance(s, A.members, B.members) == doctest::Approx(1.0));
  CHECK(t.raw_length(A.id) == doctest::Approx(3.5));
  CHECK(A.neighbors == std::vector<int>{B.id});
  CHECK(validate_tree(s, t).ok());
}

TEST_CASE("root hat and far cubes") {
  PointSpace s = integers(8);
  DyadicTree t = build_tree(s, 0.5);
  std::vector<int> all(8);
  for (int i = 0; i < 8; ++i) all[i] = i;
  CHECK(t.hat(t.root()) == all);
  for (int g = 1; g <= t.depth(); ++g)
    for (int q : t.generations[g])
      for (int r : t.generations[g]) {
        if (q == r) continue;
        bool nb = std::find(t.cube(q).neighbors.begin(), t.cube(q).neighbors.end(), r) != t.cube(q).neighbors.end();
        bool close = set_distance(s, t.cube(q).members, t.cube(r).members) < t.raw_length(q);
        CHECK(nb == close);
      }
}

TEST_CASE("single point tree") {
  RMat c(1, 1);
  c << 0.0;
  PointSpace s = from_points(c, RVec::Ones(1));
  DyadicTree t = build_tree(s, 0.5, 4);
  for (const auto& gen : t.generations) {
    REQUIRE(gen.size() == 1);
    CHECK(t.cube(gen[0]).members == std::vector<int>{0});
  }
}

TEST_CASE("grid tree passes every invariant") {
  GenParams p;
  p.nx = p.ny = 8;
  PointSpace s = generate("uniform-grid-2d", p);
  DyadicTree t = build_tree(s, 0.5);
  TreeValidation v = validate_tree(s, t);
  CHECK(v.ok());
  CHECK(v.a0 > 0.0);
  double total = 0.0;
  for (int q : t.generations.back()) total += t.cube(q).mass;
  CHECK(total == doctest::Approx(s.total_mass()));
}

TEST_CASE("small boundary") {
  PointSpace s = integers(8);
  DyadicTree t = build_tree(s, 0.5);
  int A = t.generations[1][0];
  // t * l(Q) = 1 raw
  BoundaryProfile bp = small_boundary_profile(s, t, A, {1.0 / 3.5, 10.0});
  CHECK(bp.ratio[0] == doctest::Approx(1.0 / 3.0));
  CHECK(bp.ratio[1] == doctest::Approx(1.0));
  CHECK_THROWS(small_boundary_profile(s, t, t.root(), {0.5}));

  GenParams g;
  g.nx = g.ny = 16;
  PointSpace grid = generate("uniform-grid-2d", g);
  DyadicTree tg = build_tree(grid, 0.5);
  BoundaryProfile env = tree_boundary_profile(grid, tg, default_boundary_grid());
  CHECK(env.eta > 0.0);
}

TEST_CASE("power fit") {
  std::vector<double> x = {0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.5));
  PowerFit f = fit_power_law(x, y);
  CHECK(f.C == doctest::Approx(3.0));
  CHECK(f.eta == doctest::Approx(0.5));
  CHECK(f.residual < 1e-12);
}
