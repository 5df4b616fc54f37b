// Acceptance suite: one PASS/FAIL line per criterion, details on the following indented lines.
#include <algorithm>
#include <array>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ltb/accretive.hpp"
#include "ltb/bcr.hpp"
#include "ltb/dyadic.hpp"
#include "ltb/geometry.hpp"
#include "ltb/haar.hpp"
#include "ltb/io.hpp"
#include "ltb/op.hpp"
#include "ltb/stopping.hpp"
#include "support.hpp"

using namespace ltb;
using ltbtest::Stopwatch;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("  info " + what); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

KernelSpec kernel(const std::string& name) {
  KernelSpec k;
  k.kind = parse_kernel(name);
  return k;
}

// ---------------------------------------------------------------- 1
Outcome criterion1(const std::vector<ltbtest::NamedSpace>& spaces) {
  Outcome o;
  Stopwatch sw;
  double worstC1 = 0.0, minA0 = 1e300, minEta = 1e300;
  for (const auto& ns : spaces) {
    DyadicTree t = build_tree(ns.space, 0.5);
    TreeValidation v = validate_tree(ns.space, t);
    if (!v.ok()) o.check(false, ns.name + ": " + v.detail);
    if (!(v.a0 > 0)) o.check(false, ns.name + ": a0 not positive");
    worstC1 = std::max(worstC1, v.C1);
    minA0 = std::min(minA0, v.a0);
    if (ns.uniform) {
      BoundaryProfile bp = tree_boundary_profile(ns.space, t, default_boundary_grid());
      o.check(bp.eta >= 0.2, fmt("%s small boundary eta = %.3f (C = %.3f, residual %.3f)", ns.name.c_str(), bp.eta,
                                 bp.C, bp.residual));
      minEta = std::min(minEta, bp.eta);
    }
  }
  o.check(true, fmt("%zu spaces: partition, nesting, diameter, inner ball; max C1 = %.3f, min a0 = %.4f",
                    spaces.size(), worstC1, minA0));
  double el = sw.seconds();
  o.check(el <= 5.0, fmt("runtime %.2f s (limit 5 s)", el));
  return o;
}

// ---------------------------------------------------------------- 2
Outcome criterion2(const std::vector<ltbtest::NamedSpace>& spaces) {
  Outcome o;
  Stopwatch sw;
  double r2 = 0, r4 = 0, r5 = 0, r6 = 0, haar = 0, fl = 1e300, fu = 0;
  int cubes = 0;
  for (const auto& ns : spaces) {
    const PointSpace& s = ns.space;
    DyadicTree t = build_tree(s, 0.5);
    for (int kind = 0; kind < 2; ++kind) {
      SystemSpec spec;
      spec.kind = kind == 0 ? SystemKind::ConstantOne : SystemKind::Oscillatory;
      spec.amplitude = kind == 0 ? 0.0 : 0.5;
      spec.seed = 7;
      AccretiveSystem sys(s, t, spec);
      CVec b = sys.b_dense(1, t.root());
      std::vector<int> spa;
      for (const Cube& Q : t.cubes)
        if (is_spa(s, t, b, Q.id, 0.125)) spa.push_back(Q.id);
      HaarSystem hs = build_haar_system(s, t, b, spa, 0.125);
      CVec f = ltbtest::random_vec(s.size(), 11);
      for (const WaveletEntry& e : hs.entries) {
        const int N = static_cast<int>(e.children.size());
        const int S = e.count();
        if (S == 0) continue;
        ++cubes;
        // (2) and (4) from child-level integrals of b
        for (int a = 0; a < S; ++a) {
          cplx i1 = 0, i2 = 0;
          double n1 = 0, n2 = 0;
          for (int k = 0; k < N; ++k) {
            const auto& M = t.cube(e.children[k]).members;
            cplx bint = integral(s, M, b);
            double babs = 0;
            for (int x : M) babs += std::abs(b[x]) * s.weight(x);
            i1 += bint * e.phi(a, k);
            i2 += bint * e.phit(a, k);
            n1 += babs * std::abs(e.phi(a, k));
            n2 += babs * std::abs(e.phit(a, k));
          }
          r2 = std::max({r2, std::abs(i1) / n1, std::abs(i2) / n2});
          for (int c = 0; c < S; ++c) {
            cplx acc = 0;
            for (int k = 0; k < N; ++k) acc += e.phit(a, k) * integral(s, t.cube(e.children[k]).members, b) * e.phi(c, k);
            r4 = std::max(r4, std::abs(acc - (a == c ? 1.0 : 0.0)));
          }
        }
        // (5) against the direct formula for Delta^b
        SparseFn d = adapted_difference(s, t, b, e.cube, f, 0.125);
        SparseFn w = synthesis(t, e, analysis(s, t, e, f));
        double num = 0, den = 0;
        for (std::size_t k = 0; k < d.size(); ++k) {
          num = std::max(num, std::abs(d.val[k] - w.val[k]));
          den = std::max(den, std::abs(d.val[k]));
        }
        if (den > 0) r5 = std::max(r5, num / den);
        // (6) with the recorded bounds
        auto a = analysis(s, t, e, f);
        double asq = 0, dsq = 0;
        for (cplx z : a) asq += std::norm(z);
        for (std::size_t k = 0; k < d.size(); ++k) dsq += std::norm(d.val[k]) * s.weight(d.idx[k]);
        if (asq > 0) {
          double lo = e.frame_lower * asq, hi = e.frame_upper * asq;
          double excess = std::max(lo - dsq, dsq - hi) / dsq;
          r6 = std::max(r6, excess);
        }
        fl = std::min(fl, e.frame_lower);
        fu = std::max(fu, e.frame_upper);
        // b = 1: standard orthonormal Haar values
        if (kind == 0) {
          for (int a2 = 0; a2 < S; ++a2)
            for (int k = 0; k < N; ++k) {
              haar = std::max(haar, std::abs(e.phi(a2, k) - e.w(a2, k)));
              haar = std::max(haar, std::abs(e.phit(a2, k) - e.w(a2, k)));
            }
          if (N == 2) {
            const double m1 = e.child_mass[0], m2 = e.child_mass[1];
            const double c = std::sqrt(m1 * m2 / (m1 + m2));
            haar = std::max(haar, std::abs(std::abs(e.w(0, 0)) - c / m1));
            haar = std::max(haar, std::abs(std::abs(e.w(0, 1)) - c / m2));
          }
        }
      }
    }
  }
  o.check(r2 <= 1e-9, fmt("(2) mean zero against b: max relative residual %.2e over %d cube systems", r2, cubes));
  o.check(r4 <= 1e-9, fmt("(4) biorthogonality: max residual %.2e", r4));
  o.check(r5 <= 1e-9, fmt("(5) reconstruction: max relative residual %.2e", r5));
  o.check(r6 <= 1e-9, fmt("(6) frame bounds hold, recorded lower %.4f upper %.4f (max excess %.1e)", fl, fu, r6));
  o.check(haar <= 1e-12, fmt("b = 1 gives standard Haar values: max deviation %.2e", haar));
  double el = sw.seconds();
  o.check(el <= 5.0, fmt("runtime %.2f s (limit 5 s)", el));
  return o;
}

// ---------------------------------------------------------------- 3
// independent recursive stopping rule, evaluated from scratch per cube
std::vector<CubeClass> reference_stopping(const PointSpace& s, const DyadicTree& t, int root, const CVec& b,
                                          const CVec& Tb, double p, double qp, double delta, double C) {
  std::vector<CubeClass> cls(t.cubes.size(), CubeClass::Outside);
  std::function<bool(int)> stops = [&](int id) {
    double mass = 0;
    cplx bsum = 0;
    double a = 0, c = 0;
    for (int x : t.cube(id).members) {
      mass += s.weight(x);
      bsum += b[x] * s.weight(x);
      a += std::pow(std::abs(b[x]), p) * s.weight(x);
      c += std::pow(std::abs(Tb[x]), qp) * s.weight(x);
    }
    return std::abs(bsum / mass) < delta || (a + c) / mass > C;
  };
  std::function<void(int)> mark_inside = [&](int id) {
    for (int ch : t.cube(id).children) {
      cls[ch] = CubeClass::Inside;
      mark_inside(ch);
    }
  };
  std::function<void(int)> visit = [&](int id) {
    bool any_top = false;
    for (int ch : t.cube(id).children) {
      if (stops(ch)) {
        cls[ch] = CubeClass::Top;
        mark_inside(ch);
        any_top = true;
      } else {
        visit(ch);
      }
    }
    cls[id] = any_top ? CubeClass::Buffer : CubeClass::Spa;
  };
  visit(root);
  return cls;
}

Outcome criterion3() {
  Outcome o;
  Stopwatch sw;
  PointSpace s = ltbtest::line(64);
  DyadicTree t = build_tree(s, 0.5);
  KernelOperator op = assemble(s, kernel("cauchy-1d"));
  const double amps[] = {0.5, 1.0, 1.5, 2.0, 0.5, 1.5, 2.5, 1.0, 0.5, 2.0};
  const double deltas[] = {0.125, 0.125, 0.125, 0.25, 0.125, 0.125, 0.125, 0.25, 0.125, 0.125};
  const double cfac[] = {64, 64, 64, 64, 2, 4, 64, 3, 64, 64};
  int mismatches = 0, tops_total = 0;
  double min_eps05 = 1.0, r55 = 0, r58 = 0, r59 = 0, r510 = 0, worst57 = 0;
  bool packing = true, mean = true, tri = true, bound57 = true;
  for (int k = 0; k < 10; ++k) {
    SystemSpec spec;
    spec.kind = SystemKind::Oscillatory;
    spec.amplitude = amps[k];
    spec.seed = 1000 + k;
    AccretiveSystem sys(s, t, spec);
    SizeReport sz = verify_size(sys, op);
    StoppingParams sp;
    sp.delta_stop = deltas[k];
    sp.c_stop = cfac[k] * sz.c32;
    for (int side = 1; side <= 2; ++side) {
      StoppingDecomposition d = stopping_for_system(sys, op, side, t.root(), sp);
      CVec b = sys.b_dense(side, t.root());
      CVec Tb = side == 1 ? op.apply(b) : op.adjoint().apply(b);
      auto ref = reference_stopping(s, t, t.root(), b, Tb, side == 1 ? sys.p() : sys.q(),
                                    side == 1 ? sys.qp() : sys.pp(), sp.delta_stop, sp.c_stop);
      for (std::size_t id = 0; id < ref.size(); ++id)
        if (ref[id] != d.cls[id]) ++mismatches;
      tops_total += static_cast<int>(d.tops.size());
      PackingReport pr = packing_report(s, t, d);
      packing = packing && pr.buffer_packing_ok;
      mean = mean && pr.mean_bound_ok;
      tri = tri && pr.trichotomy_ok && pr.maximality_ok;
      if (amps[k] == 0.5) min_eps05 = std::min(min_eps05, d.eps);
      for (int trial = 0; trial < 3; ++trial) {
        CVec f = ltbtest::random_vec(s.size(), 50 + 7 * k + trial);
        f /= f.cwiseAbs().maxCoeff();
        Decomposition55 dc = decomposition_55(s, t, d, sys, f);
        r55 = std::max(r55, dc.residual);
        Lemma56Report lr = lemma_56_suite(s, t, d, sys, f, sz.c32);
        r58 = std::max(r58, lr.res58);
        r59 = std::max(r59, lr.res59);
        r510 = std::max(r510, lr.res510);
        worst57 = std::max(worst57, std::max(lr.ratio57, lr.ratio511) / lr.bound);
        bound57 = bound57 && lr.ratio57 <= lr.bound * (1 + 1e-12) && lr.ratio511 <= lr.bound * (1 + 1e-12);
      }
    }
  }
  o.check(mismatches == 0, fmt("reference recursion: %d classification mismatches over 10 configs x 2 sides (%d tops)",
                               mismatches, tops_total));
  o.check(min_eps05 > 0, fmt("(5.2) packing at amplitude 0.5: min eps = %.4f", min_eps05));
  o.check(packing, fmt("(5.4) buffer packing within C_X = %.3f", t.CX));
  o.check(mean, "(5.3) on retained cubes and tops");
  o.check(tri, "trichotomy and maximality of tops");
  o.check(r55 <= 1e-10, fmt("(5.5) pointwise residual %.2e", r55));
  o.check(std::max({r58, r59, r510}) <= 1e-12, fmt("(5.8) %.1e  (5.9) %.1e  (5.10) %.1e", r58, r59, r510));
  o.check(bound57, fmt("(5.7)/(5.11) within 1 + C_A: worst ratio to bound %.3f", worst57));
  double el = sw.seconds();
  o.check(el <= 10.0, fmt("runtime %.2f s (limit 10 s)", el));
  return o;
}

// ---------------------------------------------------------------- 4, 10
struct BcrRun {
  std::string label;
  BcrDecomposition dec;
  std::vector<CompressionPoint> sweep;
};

struct Problem {
  PointSpace s;
  DyadicTree t;
  KernelOperator op;
  std::unique_ptr<AccretiveSystem> sys;
  StoppingDecomposition d1, d2;
  std::unique_ptr<BcrContext> ctx;
};

std::unique_ptr<Problem> make_problem(int n, const std::string& kern, SystemKind kind, double amp) {
  auto P = std::make_unique<Problem>();
  P->s = ltbtest::line(n);
  P->t = build_tree(P->s, 0.5);
  P->op = assemble(P->s, kernel(kern));
  SystemSpec spec;
  spec.kind = kind;
  spec.amplitude = amp;
  spec.seed = 3;
  P->sys = std::make_unique<AccretiveSystem>(P->s, P->t, spec);
  P->d1 = stopping_for_system(*P->sys, P->op, 1, P->t.root(), {});
  P->d2 = stopping_for_system(*P->sys, P->op, 2, P->t.root(), {});
  P->ctx = std::make_unique<BcrContext>(*P->sys, P->op, P->d1, P->d2);
  return P;
}

bool monotone(const std::vector<CompressionPoint>& sweep) {
  for (std::size_t k = 1; k < sweep.size(); ++k)
    if (sweep[k].abs_error > sweep[k - 1].abs_error * (1 + 1e-9) + 1e-300) return false;
  return true;
}

Outcome criterion4(std::vector<BcrRun>& runs) {
  Outcome o;
  Stopwatch sw;
  double res = 0, dual = 0, beta = 0, mz = 0, r71 = 0;
  int beta_cubes = 0, tops = 0;
  for (const char* kern : {"cauchy-1d", "hardy-size"})
    for (int osc = 0; osc < 2; ++osc) {
      auto P = make_problem(64, kern, osc ? SystemKind::Oscillatory : SystemKind::ConstantOne, osc ? 1.5 : 0.0);
      tops += static_cast<int>(P->d1.tops.size() + P->d2.tops.size());
      for (int k = 0; k < 10; ++k) {
        CVec f = ltbtest::random_vec(64, 200 + k), g = ltbtest::random_vec(64, 300 + k);
        BcrDecomposition dec = bcr_terms(*P->ctx, f, g);
        res = std::max(res, dec.residual);
        dual = std::max(dual, dec.w_duality);
        mz = std::max(mz, dec.mean_zero);
        r71 = std::max(r71, dec.residual71);
        if (dec.v_split.beta_cubes > 0) beta = std::max(beta, dec.v_split.beta_cancellation);
        beta_cubes += dec.v_split.beta_cubes;
        if (k == 0) {
          BcrRun run;
          run.label = std::string(kern) + (osc ? "/oscillatory" : "/constant-one");
          auto w = contribution_weights(*P->ctx, dec);
          run.sweep = compression_sweep(dec, w, default_tau_grid(w));
          run.dec = std::move(dec);
          runs.push_back(std::move(run));
        }
      }
    }
  o.check(res <= 1e-8, fmt("telescoping |exact - (e0+U+V+W)| / (|f||g||T|): max %.2e over 40 runs", res));
  o.check(dual <= 1e-10, fmt("W by duality: max relative gap %.2e", dual));
  o.check(beta <= 1e-10, fmt("V13 cancellation |sum_R beta| / sum |beta|: max %.2e over %d cubes", beta, beta_cubes));
  o.note(fmt("D_j mean zero %.1e, (7.1) residual %.1e, tops on the oscillatory sides %d", mz, r71, tops));
  double el = sw.seconds();
  o.check(el <= 30.0, fmt("runtime %.2f s (limit 30 s)", el));
  return o;
}

// ---------------------------------------------------------------- 5
Outcome criterion5() {
  Outcome o;
  Stopwatch sw;
  std::array<std::vector<double>, 8> vals, sq;
  for (int n : {64, 128, 256}) {
    auto P = make_problem(n, "cauchy-1d", SystemKind::ConstantOne, 0.0);
    CVec f = ltbtest::random_vec(n, 17), g = ltbtest::random_vec(n, 18);
    AppendixBReport r = appendix_b_ratios(*P->ctx, f, g);
    auto Q = make_problem(n, "cauchy-1d", SystemKind::SquareWave, 1.6);
    AppendixBReport rq = appendix_b_ratios(*Q->ctx, f, g);
    for (int k = 0; k < 8; ++k) {
      if (r.pairs[k] > 0) vals[k].push_back(r.ratio[k]);
      if (rq.pairs[k] > 0) sq[k].push_back(rq.ratio[k]);
    }
  }
  for (int k = 0; k < 8; ++k) {
    if (vals[k].empty()) {
      o.note(fmt("B.%d: no admissible pairs with b = 1", k + 1));
    } else {
      bool finite = std::all_of(vals[k].begin(), vals[k].end(), [](double v) { return std::isfinite(v); });
      double sp = spread(vals[k]);
      std::ostringstream os;
      for (double v : vals[k]) os << ' ' << fmt("%.4g", v);
      o.check(finite && vals[k].size() == 3 && sp <= 2.0, fmt("B.%d ratios n=64,128,256:%s (spread %.3f)", k + 1,
                                                               os.str().c_str(), sp));
    }
    if (!sq[k].empty()) {
      std::ostringstream os;
      for (double v : sq[k]) os << ' ' << fmt("%.4g", v);
      o.note(fmt("B.%d square-wave system:%s (spread %.3f)", k + 1, os.str().c_str(), spread(sq[k])));
    }
  }
  double el = sw.seconds();
  o.check(el <= 60.0, fmt("runtime %.2f s (limit 60 s)", el));
  return o;
}

// ---------------------------------------------------------------- 6
Outcome criterion6() {
  Outcome o;
  PointSpace s = ltbtest::line(256);
  DyadicTree t = build_tree(s, 0.5);
  PairMeasure pm(s);
  const double alpha = 1.0, dpa = std::pow(t.delta, alpha);
  // fine sums: same-generation sums (p = 0) and the delta^{p alpha} decay in p
  {
    auto rows = summing_lemma(s, t, pm, alpha, true, 2, 6, 2);
    std::vector<double> base;
    double worst_step = 1.0;
    for (const auto& r : rows) {
      if (r.p == 0) base.push_back(r.max_sum);
      for (const auto& r2 : rows)
        if (r2.ref_gen == r.ref_gen && r2.p == r.p + 1 && r.max_sum > 0 && r2.max_sum > 0) {
          double step = (r2.max_sum / r.max_sum) / dpa;
          worst_step = std::max({worst_step, step, 1.0 / step});
        }
    }
    std::ostringstream os;
    for (double v : base) os << ' ' << fmt("%.3f", v);
    o.check(spread(base) <= 2.0,
            fmt("fine sums (p = 0), generations 2-6:%s (spread %.3f)", os.str().c_str(), spread(base)));
    o.check(worst_step <= 2.0, fmt("fine sums per-step ratio against delta^alpha within factor %.3f", worst_step));
  }
  // coarse sums with R one generation up; generation 2 has no admissible R
  {
    auto rows = summing_lemma(s, t, pm, alpha, false, 2, 6, 2);
    std::vector<double> p1;
    std::ostringstream os, steps;
    for (const auto& r : rows) {
      if (r.p == 1 && r.max_sum > 0) {
        p1.push_back(r.max_sum);
        os << ' ' << fmt("%.3f", r.max_sum);
      }
      if (r.p == 2 && r.max_sum > 0)
        for (const auto& r1 : rows)
          if (r1.ref_gen == r.ref_gen && r1.p == 1) steps << ' ' << fmt("%.2f", r.max_sum / r1.max_sum / dpa);
    }
    o.check(p1.size() >= 4 && spread(p1) <= 2.0,
            fmt("coarse sums (p = 1), generations 3-6:%s (spread %.3f)", os.str().c_str(), spread(p1)));
    o.note(fmt("coarse sums p = 2 over p = 1 in units of delta^alpha:%s", steps.str().c_str()));
  }
  return o;
}

// ---------------------------------------------------------------- 7
Outcome criterion7() {
  Outcome o;
  Stopwatch sw;
  std::vector<double> h26, h28;
  for (int n : {64, 128, 256, 512}) {
    PointSpace s = ltbtest::line(n);
    DyadicTree t = build_tree(s, 0.5);
    KernelOperator op = assemble(s, kernel("hardy-size"));
    // adjacent generation-2 cubes in the interior of [0, 1]
    const auto& g2 = t.generations[2];
    std::vector<int> ids(g2.begin(), g2.end());
    std::sort(ids.begin(), ids.end(), [&](int a, int b) { return t.cube(a).members[0] < t.cube(b).members[0]; });
    const auto& Q = t.cube(ids[1]).members;
    const auto& R = t.cube(ids[2]).members;
    h26.push_back(hardy_constant(s, Q, R, 2.0).value);
    std::vector<int> ring;
    for (int x : t.hat(ids[1]))
      if (!std::binary_search(Q.begin(), Q.end(), x)) ring.push_back(x);
    h28.push_back(restricted_norm(op, Q, ring, 2.0).value);
  }
  std::vector<double> hb;
  {
    PointSpace s = ltbtest::line(512);
    for (double r : {1.0 / 16, 1.0 / 8, 1.0 / 4}) hb.push_back(hardy_ball(s, 256, r, 2.0).estimate.value);
  }
  auto show = [](const std::vector<double>& v) {
    std::ostringstream os;
    for (double x : v) os << ' ' << fmt("%.4f", x);
    return os.str();
  };
  o.check(spread(h26) <= 1.1, fmt("(2.6) adjacent cubes, n = 64..512:%s (spread %.3f)", show(h26).c_str(), spread(h26)));
  o.check(spread(h28) <= 1.1, fmt("(2.8) hardy-size, n = 64..512:%s (spread %.3f)", show(h28).c_str(), spread(h28)));
  o.check(spread(hb) <= 1.1, fmt("(3.8) balls r = 1/16, 1/8, 1/4 on n = 512:%s (spread %.3f)", show(hb).c_str(),
                                 spread(hb)));
  double el = sw.seconds();
  o.check(el <= 30.0, fmt("runtime %.2f s (limit 30 s)", el));
  return o;
}

// ---------------------------------------------------------------- 8
Outcome criterion8() {
  Outcome o;
  PointSpace s = ltbtest::line(64);
  DyadicTree t = build_tree(s, 0.5);
  KernelOperator op = assemble(s, kernel("hardy-size"));
  AccretiveSystem sys(s, t, SystemSpec{});
  SizeReport sz = verify_size(sys, op);
  DualNormReport d34 = verify_34(sys, op, 2.0);
  WbpReport wbp = verify_wbp(sys, op);
  o.check(std::isfinite(sz.c32) && std::isfinite(sz.c33) && std::isfinite(d34.constant) && std::isfinite(wbp.c35) &&
              std::isfinite(wbp.c36),
          fmt("(3.2) %.3f  (3.3) %.3f  (3.4) %.3f over %d configs  (3.5) %.3f  (3.6) %.3f", sz.c32, sz.c33,
              d34.constant, d34.configs, wbp.c35, wbp.c36));
  double worst_gap = 0, worst_over = 0;
  int cases = 0;
  auto trial = [&](const std::vector<cplx>& v, const std::vector<double>& m, double mRp, std::uint64_t seed) {
    double cf = dual_norm_closed_form(v, m, mRp, 2.0);
    double rs = dual_norm_random_search(v, m, mRp, 2.0, 100000, seed);
    worst_over = std::max(worst_over, rs / cf - 1.0);
    worst_gap = std::max(worst_gap, 1.0 - rs / cf);
    ++cases;
  };
  if (!d34.worst.Rn.empty()) {
    std::vector<double> m;
    for (int R : d34.worst.Rn) m.push_back(t.cube(R).mass);
    trial(d34.worst.v, m, t.cube(d34.worst.Rp).mass, 5);
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1), w(0.2, 1.0);
  for (int c = 0; c < 8; ++c) {
    int N = 1 + c % 4;
    std::vector<cplx> v(N);
    std::vector<double> m(N);
    for (int k = 0; k < N; ++k) {
      v[k] = cplx(u(rng), u(rng));
      m[k] = w(rng);
    }
    trial(v, m, w(rng), 20 + c);
  }
  o.check(worst_over <= 1e-12, fmt("closed form dominates 1e5-sample search in %d cases (max excess %.1e)", cases,
                                   worst_over));
  o.check(worst_gap <= 0.02, fmt("closed form attained within %.3f%% at nu = 2", 100 * worst_gap));
  return o;
}

// ---------------------------------------------------------------- 9
Outcome criterion9() {
  Outcome o;
  Stopwatch sw;
  GeometryOptions opt;
  GenParams lp;
  lp.n = 61;
  lp.h = 0.05;
  PointSpace full = generate("uniform-line", lp);  // [0, 3] with h = 0.05
  PointSpace gap = generate("line-with-gap", GenParams{});
  GenParams gp;
  gp.nx = gp.ny = 16;
  PointSpace grid = generate("uniform-grid-2d", gp);
  GenParams cp;
  cp.n = 128;
  PointSpace circle = generate("circle", cp);
  PointSpace line = ltbtest::line(128);
  PointSpace tri = generate("triangle-edges", GenParams{});
  struct Case {
    const char* name;
    const PointSpace* s;
  };
  for (Case c : {Case{"uniform-line", &line}, Case{"uniform-grid-2d", &grid}, Case{"circle", &circle}}) {
    GeodesicProfile g = monotone_geodesic_constant(*c.s, default_u_grid(*c.s));
    o.check(g.pass, fmt("%s monotone geodesic C = %.3f over %zu scales", c.name, g.overall, g.u.size()));
    DecayProfile ra = annular_decay(*c.s, opt, true);
    o.check(ra.fit.eta >= 0.2, fmt("%s relative annular eta = %.3f (residual %.3f)", c.name, ra.fit.eta,
                                   ra.fit.residual));
  }
  GeodesicProfile gg = monotone_geodesic_constant(gap, {0.1});
  o.check(gg.overall >= 10.0, fmt("line-with-gap C(0.1) = %.3f (pair %d, %d), property fails", gg.overall, gg.wx[0],
                                  gg.wy[0]));
  GeodesicProfile gt = monotone_geodesic_constant(tri, default_u_grid(tri));
  o.check(!gt.pass, fmt("triangle-edges monotone geodesic C = %.3f, property fails", gt.overall));
  DecayProfile tra = annular_decay(tri, opt, true);
  o.note(fmt("triangle-edges relative annular eta = %.3f", tra.fit.eta));
  std::vector<int> centers;
  for (int x : sample_centers(gap, 8)) centers.push_back(x);
  std::vector<double> radii = {0.15, 0.3, 0.6};
  RestrictionReport rr = restriction_stability(full, gap, centers, radii, 2.0, 2000, 1);
  o.check(rr.ratio <= 2.0 && rr.ratio >= 0.5,
          fmt("line-with-gap ball Hardy max %.4f vs full line %.4f (ratio %.3f, kappa %.3f)", rr.hardy_sub,
              rr.hardy_full, rr.ratio, rr.kappa));
  double el = sw.seconds();
  o.check(el <= 60.0, fmt("runtime %.2f s (limit 60 s)", el));
  return o;
}

// ---------------------------------------------------------------- 10
Outcome criterion10(const std::vector<BcrRun>& runs, std::string* csv) {
  Outcome o;
  Stopwatch sw;
  bool all_monotone = true;
  for (const auto& r : runs) {
    bool m = monotone(r.sweep);
    all_monotone = all_monotone && m;
    if (!m) o.check(false, r.label + ": error not monotone in tau");
  }
  auto P = make_problem(256, "cauchy-1d", SystemKind::ConstantOne, 0.0);
  CVec f = ltbtest::random_vec(256, 41), g = ltbtest::random_vec(256, 42);
  BcrDecomposition dec = bcr_terms(*P->ctx, f, g);
  auto w = contribution_weights(*P->ctx, dec);
  auto sweep = compression_sweep(dec, w, default_tau_grid(w));
  all_monotone = all_monotone && monotone(sweep);
  bool mass_monotone = true;
  for (std::size_t k = 1; k < sweep.size(); ++k)
    if (sweep[k].dropped_mass > sweep[k - 1].dropped_mass * (1 + 1e-12)) mass_monotone = false;
  CsvWriter out({"tau", "kept_fraction", "relative_error"});
  const CompressionPoint* at50 = nullptr;
  for (const auto& pt : sweep) {
    out.row(std::vector<double>{pt.tau, pt.kept_fraction, pt.relative_error});
    if (pt.kept_fraction <= 0.5 && (!at50 || pt.kept_fraction > at50->kept_fraction)) at50 = &pt;
  }
  if (csv) *csv = out.str();
  o.check(all_monotone, fmt("error nonincreasing as tau decreases on %zu sweeps", runs.size() + 1));
  if (!at50) {
    o.check(false, "no tau drops half of the weighted pairs");
  } else {
    o.check(at50->relative_error <= 0.1,
            fmt("cauchy n = 256: tau = %.4g keeps %.3f of %d weighted pairs, relative error %.3e (normalized %.3e)",
                at50->tau, at50->kept_fraction, at50->weighted, at50->relative_error, at50->normalized_error));
    o.note(fmt("soft target 1e-2 %s", at50->relative_error <= 1e-2 ? "met" : "not met"));
    o.note(fmt("dropped mass sum |dropped| / |exact| %s in tau", mass_monotone ? "monotone" : "not monotone"));
  }
  o.note(fmt("runtime %.2f s", sw.seconds()));
  return o;
}

// ---------------------------------------------------------------- 11
Outcome criterion11(const std::string& first_csv) {
  Outcome o;
  std::string again;
  std::vector<BcrRun> none;
  criterion10(none, &again);
  o.check(!first_csv.empty() && first_csv == again,
          fmt("compression sweep CSV byte-identical on re-run (%zu bytes)", first_csv.size()));
  auto csv_of = [] {
    PointSpace s = ltbtest::line(128);
    DyadicTree t = build_tree(s, 0.5);
    BoundaryProfile bp = tree_boundary_profile(s, t, default_boundary_grid());
    CsvWriter w({"t", "ratio"});
    for (std::size_t k = 0; k < bp.t.size(); ++k) w.row(std::vector<double>{bp.t[k], bp.ratio[k]});
    GeodesicProfile g = monotone_geodesic_constant(s, default_u_grid(s));
    for (std::size_t k = 0; k < g.u.size(); ++k) w.row(std::vector<double>{g.u[k], g.C[k]});
    return w.str();
  };
  o.check(csv_of() == csv_of(), "boundary and geodesic profile CSVs byte-identical on re-run");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--strict") strict = true;
  auto spaces = ltbtest::seeded_spaces();
  std::vector<BcrRun> runs;
  std::string sweep_csv;
  std::vector<std::pair<int, std::function<Outcome()>>> crits = {
      {1, [&] { return criterion1(spaces); }},
      {2, [&] { return criterion2(spaces); }},
      {3, [&] { return criterion3(); }},
      {4, [&] { return criterion4(runs); }},
      {5, [&] { return criterion5(); }},
      {6, [&] { return criterion6(); }},
      {7, [&] { return criterion7(); }},
      {8, [&] { return criterion8(); }},
      {9, [&] { return criterion9(); }},
      {10, [&] { return criterion10(runs, &sweep_csv); }},
      {11, [&] { return criterion11(sweep_csv); }},
  };
  int failed = 0;
  for (auto& [id, fn] : crits) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d\n", o.pass ? "PASS" : "FAIL", id);
    for (const auto& n : o.notes) std::printf("%s\n", n.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(crits.size()) - failed, crits.size());
  return strict && failed > 0 ? 1 : 0;
}
