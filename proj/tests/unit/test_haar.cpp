#include <doctest.h>

#include <random>

#include "ltb/haar.hpp"

using namespace ltb;

namespace {

PointSpace integers(int n) {
  GenParams p;
  p.n = n;
  p.h = 1.0;
  return generate("uniform-line", p);
}

CVec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec f(n);
  for (int i = 0; i < n; ++i) f[i] = cplx(g(rng), g(rng));
  return f;
}

}  // namespace

TEST_CASE("classical differences") {
  PointSpace s = integers(2);
  DyadicTree t = build_tree(s, 0.5);
  CVec f(2);
  f << 1.0, 0.0;
  CVec d = densify(classical_difference(s, t, t.root(), f), 2);
  CHECK(std::abs(d[0] - 0.5) < 1e-15);
  CHECK(std::abs(d[1] + 0.5) < 1e-15);

  PointSpace line = generate("uniform-line", GenParams{});
  DyadicTree tl = build_tree(line, 0.5);
  for (const Cube& Q : tl.cubes)
    CHECK(densify(classical_difference(line, tl, Q.id, CVec::Constant(64, 3.0)), 64).cwiseAbs().maxCoeff() < 1e-14);
  ParsevalReport pr = classical_parseval(line, tl, random_vec(64, 3));
  CHECK(pr.reconstruction_residual <= 1e-10);
  CHECK(std::abs(pr.energy - pr.difference_sum) <= 1e-10 * pr.energy);
}

TEST_CASE("adapted difference on two points") {
  PointSpace s = integers(2);
  DyadicTree t = build_tree(s, 0.5);
  CVec b(2);
  b << 2.0, 2.0 / 3.0;
  CVec f(2);
  f << 1.0, 0.0;
  CVec d = densify(adapted_difference(s, t, b, t.root(), f), 2);
  CHECK(std::abs(d[0] - 1.0 / 8.0) < 1e-14);
  CHECK(std::abs(d[1] + 3.0 / 8.0) < 1e-14);
  CHECK(std::abs(b[0] * d[0] + b[1] * d[1]) < 1e-14);

  CVec one = CVec::Ones(2);
  CVec d1 = densify(adapted_difference(s, t, one, t.root(), f), 2);
  CVec d0 = densify(classical_difference(s, t, t.root(), f), 2);
  CHECK((d1 - d0).cwiseAbs().maxCoeff() < 1e-15);

  CVec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(adapted_difference(s, t, bad, t.root(), f), Degenerate);
}

TEST_CASE("standard haar for b = 1") {
  PointSpace s = integers(2);
  DyadicTree t = build_tree(s, 0.5);
  WaveletEntry e = build_adapted_haar(s, t, CVec::Ones(2), t.root());
  REQUIRE(e.count() == 1);
  CHECK(std::abs(e.phi(0, 0)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(e.phi(0, 0) + e.phi(0, 1)) < 1e-12);
  CHECK((e.phi - e.phit).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adapted wavelet for b = (2, 2/3)") {
  PointSpace s = integers(2);
  DyadicTree t = build_tree(s, 0.5);
  CVec b(2);
  b << 2.0, 2.0 / 3.0;
  WaveletEntry e = build_adapted_haar(s, t, b, t.root());
  REQUIRE(e.count() == 1);
  CHECK(std::abs(b[0] * e.phit(0, 0) + b[1] * e.phit(0, 1)) < 1e-12);
  CHECK(std::abs(e.phit(0, 0) * b[0] * e.phi(0, 0) + e.phit(0, 1) * b[1] * e.phi(0, 1) - 1.0) < 1e-12);
  for (int k = 0; k < 2; ++k) {
    CVec f = CVec::Zero(2);
    f[k] = 1.0;
    auto a = analysis(s, t, e, f);
    CVec rec = densify(synthesis(t, e, a), 2);
    CVec d = densify(adapted_difference(s, t, b, t.root(), f), 2);
    CHECK((rec - d).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("one child gives no wavelets") {
  RMat c(1, 1);
  c << 0.0;
  PointSpace s = from_points(c, RVec::Ones(1));
  DyadicTree t = build_tree(s, 0.5, 3);
  WaveletEntry e = build_adapted_haar(s, t, CVec::Ones(1), t.root());
  CHECK(e.count() == 0);
}

TEST_CASE("carleson ratio and the operator L") {
  PointSpace s = generate("uniform-line", GenParams{});
  DyadicTree t = build_tree(s, 0.5);
  std::vector<int> all(t.cubes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  HaarSystem sys = build_haar_system(s, t, CVec::Ones(64), all);
  CVec f = random_vec(64, 11);
  CHECK(carleson_ratio(s, t, sys, f) <= 1.0 + 1e-10);

  CVec b = CVec::Ones(64);
  for (int i = 0; i < 64; ++i) b[i] += 0.3 * ((i % 2) ? 1.0 : -1.0);
  HaarSystem sb = build_haar_system(s, t, b, all);
  CHECK(carleson_ratio(s, t, sb, b) < 1e-20);

  std::vector<cplx> zero(t.cubes.size(), 0.0), one(t.cubes.size(), 1.0);
  CHECK(apply_L(s, t, sys, zero, f).cwiseAbs().maxCoeff() == 0.0);
  CHECK(empirical_L_norm(s, t, sys, one, 2.0, 50, 3).norm <= 1.0 + 1e-10);
}
