#include <doctest.h>

#include <cmath>
#include <random>

#include "ltb/bcr.hpp"

using namespace ltb;

namespace {

CVec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec f(n);
  for (int i = 0; i < n; ++i) f[i] = cplx(g(rng), g(rng));
  return f;
}

struct Problem {
  PointSpace s;
  DyadicTree t;
  KernelOperator op;
  std::unique_ptr<AccretiveSystem> sys;
  StoppingDecomposition d1, d2;
  std::unique_ptr<BcrContext> ctx;
  Problem(int n, SystemSpec spec, KernelSpec k = {}) {
    GenParams p;
    p.n = n;
    s = generate("uniform-line", p);
    t = build_tree(s, 0.5);
    if (k.kind == KernelKind::CustomMatrix && k.custom.size() == 0) k.custom = RMat::Zero(n, n);
    op = assemble(s, k);
    sys = std::make_unique<AccretiveSystem>(s, t, spec);
    StoppingParams sp;
    sp.c_stop = 1e6;
    d1 = stopping_for_system(*sys, op, 1, t.root(), sp);
    d2 = stopping_for_system(*sys, op, 2, t.root(), sp);
    ctx = std::make_unique<BcrContext>(*sys, op, d1, d2);
  }
};

}  // namespace

TEST_CASE("zero operator gives zero terms") {
  KernelSpec k;
  k.kind = KernelKind::CustomMatrix;
  Problem P(32, SystemSpec{}, k);
  BcrDecomposition d = bcr_terms(*P.ctx, random_vec(32, 1), random_vec(32, 2));
  CHECK(std::abs(d.total()) == 0.0);
  CHECK(std::abs(d.exact) == 0.0);
}

TEST_CASE("telescoping with b = 1") {
  Problem P(64, SystemSpec{});
  CVec f = random_vec(64, 3), g = random_vec(64, 4);
  BcrDecomposition d = bcr_terms(*P.ctx, f, g);
  CHECK(std::abs(d.exact - P.op.pairing(f, g)) <= 1e-12 * d.scale);
  CHECK(d.residual <= 1e-10);

  EjDj e = e_and_d(*P.ctx, 1, f);
  for (std::size_t k = 0; k < e.E.size(); ++k) {
    int gen = e.first_gen + static_cast<int>(k);
    CVec expect = CVec::Zero(64);
    for (int q : P.t.generations[gen]) {
      cplx m = average(P.s, P.t.cube(q).members, f);
      for (int x : P.t.cube(q).members) expect[x] = m;
    }
    CHECK((e.E[k] - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("oscillatory telescoping and differences of b") {
  SystemSpec osc;
  osc.kind = SystemKind::Oscillatory;
  osc.amplitude = 0.5;
  Problem P(32, osc);
  CVec f = random_vec(32, 5), g = random_vec(32, 6);
  BcrDecomposition d = bcr_terms(*P.ctx, f, g);
  CHECK(d.residual <= 1e-8);
  CHECK(d.residual71 <= 1e-11);

  EjDj e = e_and_d(*P.ctx, 1, P.d1.b);
  for (const CVec& D : e.D) CHECK(D.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((e.E.back() - P.d1.b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("alpha weights") {
  GenParams p;
  p.n = 8;
  p.h = 1.0;
  PointSpace s = generate("uniform-line", p);
  DyadicTree t = build_tree(s, 0.5);
  REQUIRE(t.depth() >= 3);
  PairMeasure pm(s);
  int Q = t.cube_at(3, 0), R = t.cube_at(3, 4);
  REQUIRE(t.cube(Q).members == std::vector<int>{0});
  REQUIRE(t.cube(R).members == std::vector<int>{4});
  CoefficientWeight w = alpha_weight(s, t, pm, Q, R, 1.0);
  REQUIRE(w.defined);
  CHECK(!w.near);
  double l = 1.0 / 8.0, rho = 4.0 / 7.0, mu = 4.0;
  CHECK(w.mu_QR == doctest::Approx(mu));
  CHECK(w.alpha == doctest::Approx((l / rho) / mu));

  int A = t.generations[1][0], B = t.generations[1][1];
  CoefficientWeight nb = alpha_weight(s, t, pm, A, B, 1.0);
  CHECK(nb.near);
  CHECK(nb.alpha == 1.0);
}

TEST_CASE("compression at tau = 0 is exact") {
  SystemSpec osc;
  osc.kind = SystemKind::Oscillatory;
  osc.amplitude = 0.5;
  Problem P(64, osc);
  BcrDecomposition d = bcr_terms(*P.ctx, random_vec(64, 7), random_vec(64, 8));
  auto w = contribution_weights(*P.ctx, d);
  CompressionPoint c = compressed_pairing(d, w, 0.0);
  CHECK(c.kept_fraction == 1.0);
  CHECK(c.dropped == 0);
  CHECK(c.relative_error <= 1e-8);

  auto taus = default_tau_grid(w, 10);
  CHECK(taus.size() == 10);
  CHECK(taus.back() == 0.0);
  for (std::size_t k = 1; k < taus.size(); ++k) CHECK(taus[k] <= taus[k - 1]);
}
