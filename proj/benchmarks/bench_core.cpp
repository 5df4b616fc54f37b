#include <benchmark/benchmark.h>

#include <random>

#include "ltb/accretive.hpp"
#include "ltb/bcr.hpp"
#include "ltb/dyadic.hpp"
#include "ltb/geometry.hpp"
#include "ltb/haar.hpp"
#include "ltb/op.hpp"
#include "ltb/stopping.hpp"

using namespace ltb;

namespace {

PointSpace line(int n) {
  GenParams p;
  p.n = n;
  return generate("uniform-line", p);
}

CVec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(u(rng), u(rng));
  return v;
}

void BM_BuildTree(benchmark::State& st) {
  PointSpace s = line(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_tree(s, 0.5));
}
BENCHMARK(BM_BuildTree)->Arg(256)->Arg(1024);

void BM_Assemble(benchmark::State& st) {
  PointSpace s = line(static_cast<int>(st.range(0)));
  KernelSpec k;
  for (auto _ : st) benchmark::DoNotOptimize(assemble(s, k));
}
BENCHMARK(BM_Assemble)->Arg(256)->Arg(1024);

void BM_HaarSystem(benchmark::State& st) {
  PointSpace s = line(static_cast<int>(st.range(0)));
  DyadicTree t = build_tree(s, 0.5);
  SystemSpec spec;
  spec.kind = SystemKind::Oscillatory;
  spec.amplitude = 0.5;
  AccretiveSystem sys(s, t, spec);
  CVec b = sys.b_dense(1, 0);
  std::vector<int> cubes;
  for (const Cube& Q : t.cubes)
    if (is_spa(s, t, b, Q.id, 0.125)) cubes.push_back(Q.id);
  for (auto _ : st) benchmark::DoNotOptimize(build_haar_system(s, t, b, cubes));
}
BENCHMARK(BM_HaarSystem)->Arg(256)->Arg(1024);

void BM_Stopping(benchmark::State& st) {
  PointSpace s = line(static_cast<int>(st.range(0)));
  DyadicTree t = build_tree(s, 0.5);
  KernelOperator op = assemble(s, KernelSpec{});
  SystemSpec spec;
  spec.kind = SystemKind::Oscillatory;
  spec.amplitude = 1.5;
  AccretiveSystem sys(s, t, spec);
  StoppingParams sp;
  sp.c_stop = 64.0 * verify_size(sys, op).c32;
  for (auto _ : st) benchmark::DoNotOptimize(stopping_for_system(sys, op, 1, 0, sp));
}
BENCHMARK(BM_Stopping)->Arg(256);

void BM_BcrTerms(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  PointSpace s = line(n);
  DyadicTree t = build_tree(s, 0.5);
  KernelOperator op = assemble(s, KernelSpec{});
  SystemSpec spec;
  spec.kind = SystemKind::Oscillatory;
  spec.amplitude = 1.5;
  AccretiveSystem sys(s, t, spec);
  auto d1 = stopping_for_system(sys, op, 1, 0, {});
  auto d2 = stopping_for_system(sys, op, 2, 0, {});
  BcrContext ctx(sys, op, d1, d2);
  CVec f = random_vec(n, 1), g = random_vec(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(bcr_terms(ctx, f, g));
}
BENCHMARK(BM_BcrTerms)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MonotoneGeodesic(benchmark::State& st) {
  PointSpace s = line(static_cast<int>(st.range(0)));
  auto u = default_u_grid(s);
  for (auto _ : st) benchmark::DoNotOptimize(monotone_geodesic_constant(s, u));
}
BENCHMARK(BM_MonotoneGeodesic)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
