#include "ltb/bcr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace ltb {

PairMeasure::PairMeasure(const PointSpace& s) : L_(s.size(), s.size()) {
  const int n = s.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) L_(x, y) = s.lambda(x, y);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double m = std::min(L_(x, y), L_(y, x));
      L_(x, y) = m;
      L_(y, x) = m;
    }
}

double PairMeasure::operator()(const std::vector<int>& Q, const std::vector<int>& R) const {
  double m = std::numeric_limits<double>::infinity();
  for (int x : Q)
    for (int y : R) m = std::min(m, L_(x, y));
  return m;
}

namespace {

struct PairGeometry {
  double rho = 0.0;
  double mu = 0.0;
};

PairGeometry pair_geometry(const PointSpace& s, const DyadicTree& t, const PairMeasure& pm, int Q, int R) {
  PairGeometry g;
  g.rho = std::numeric_limits<double>::infinity();
  g.mu = std::numeric_limits<double>::infinity();
  for (int x : t.cube(Q).members)
    for (int y : t.cube(R).members) {
      g.rho = std::min(g.rho, s.rho(x, y));
      g.mu = std::min(g.mu, pm.at(x, y));
    }
  g.rho /= t.scale;
  return g;
}

CoefficientWeight weight_from(const DyadicTree& t, int Q, int R, const PairGeometry& g, double alpha_exp) {
  CoefficientWeight w;
  w.Q = Q;
  w.R = R;
  w.rho = g.rho;
  w.mu_QR = g.mu;
  w.alpha = std::numeric_limits<double>::quiet_NaN();
  const Cube& A = t.cube(Q);
  const Cube& B = t.cube(R);
  const double lmax = std::max(A.length, B.length), lmin = std::min(A.length, B.length);
  if (g.rho >= lmax * (1.0 - 1e-12)) {
    w.defined = true;
    w.alpha = std::sqrt(A.mass * B.mass) * std::pow(lmin / g.rho, alpha_exp) / g.mu;
  } else if (A.gen == B.gen) {
    w.defined = true;
    w.near = true;
    w.alpha = 1.0;
  }
  return w;
}

}  // namespace

CoefficientWeight alpha_weight(const PointSpace& s, const DyadicTree& t, const PairMeasure& pm, int Q, int R,
                               double alpha_exp) {
  return weight_from(t, Q, R, pair_geometry(s, t, pm, Q, R), alpha_exp);
}

BcrContext::BcrContext(const AccretiveSystem& sys, const KernelOperator& op, const StoppingDecomposition& d1,
                       const StoppingDecomposition& d2)
    : sys_(&sys), op_(&op), adj_(op.adjoint()) {
  if (d1.root != d2.root) throw InvalidArgument("stopping decompositions must share the root");
  if (d1.side != 1 || d2.side != 2) throw InvalidArgument("expected side 1 and side 2 decompositions");
  const PointSpace& s = sys.space();
  const DyadicTree& t = sys.tree();
  auto fill = [&](BcrSide& S, const StoppingDecomposition& d, int side) {
    S.d = &d;
    S.side = side;
    S.haar = build_haar_system(s, t, d.b, d.omega, d.delta_stop);
    S.theta.assign(t.cubes.size(), {});
    S.block.assign(t.cubes.size(), {});
    S.top_b.assign(t.cubes.size(), {});
    for (const auto& e : S.haar.entries) {
      for (int r = 0; r < e.count(); ++r) {
        std::vector<cplx> unit(e.count(), 0.0);
        unit[r] = 1.0;
        S.theta[e.cube].push_back(synthesis(t, e, unit, &d.b));
      }
    }
    for (std::size_t id = 0; id < t.cubes.size(); ++id)
      if (d.retained(static_cast<int>(id))) S.block[id] = restrict_to(d.b, t.cube(static_cast<int>(id)).members);
    for (int P : d.tops) S.top_b[P] = sys.b(side, P);
  };
  fill(s1_, d1, 1);
  fill(s2_, d2, 2);
}

const PairMeasure& BcrContext::pair_measure() const {
  if (!pm_) pm_ = std::make_unique<PairMeasure>(space());
  return *pm_;
}

CVec formula_71(const BcrContext& ctx, int side, const CVec& f, int gen) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const BcrSide& S = ctx.side(side);
  const StoppingDecomposition& d = *S.d;
  CVec out = CVec::Zero(s.size());
  if (gen < static_cast<int>(t.generations.size())) {
    for (int Q : t.generations[gen]) {
      if (!d.retained(Q)) continue;
      const auto& M = t.cube(Q).members;
      const cplx c = integral(s, M, f) / integral(s, M, d.b);
      for (int x : M) out[x] += c * d.b[x];
    }
  }
  for (int P : d.tops) {
    if (t.cube(P).gen > gen) continue;
    const cplx m = average(s, t.cube(P).members, f);
    const SparseFn& bp = S.top_b[P];
    for (std::size_t k = 0; k < bp.idx.size(); ++k) out[bp.idx[k]] += m * bp.val[k];
  }
  return out;
}

EjDj e_and_d(const BcrContext& ctx, int side, const CVec& f) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const BcrSide& S = ctx.side(side);
  const StoppingDecomposition& d = *S.d;
  const int n = s.size();
  EjDj r;
  r.first_gen = t.cube(d.root).gen;
  const double finf = std::max(f.cwiseAbs().maxCoeff(), 1e-300);
  CVec E = average(s, t.cube(d.root).members, f) * d.b;
  r.E.push_back(E);
  for (int j = r.first_gen; j < t.depth(); ++j) {
    CVec D = CVec::Zero(n);
    for (int Q : t.generations[j]) {
      if (!d.retained(Q) || t.cube(Q).gen != j) continue;
      SparseFn piece = d.cls[Q] == CubeClass::Buffer ? buffer_function(s, t, d, ctx.system(), Q, f)
                                                     : spa_part(s, t, d, Q, f);
      cplx integ = 0.0;
      for (std::size_t k = 0; k < piece.idx.size(); ++k) {
        D[piece.idx[k]] += piece.val[k];
        integ += piece.val[k] * s.weight(piece.idx[k]);
      }
      r.mean_zero = std::max(r.mean_zero, std::abs(integ) / (t.cube(Q).mass * finf));
    }
    E = E + D;
    r.D.push_back(D);
    r.E.push_back(E);
  }
  for (std::size_t k = 0; k < r.E.size(); ++k) {
    CVec ref = formula_71(ctx, side, f, r.first_gen + static_cast<int>(k));
    r.residual71 = std::max(r.residual71, (r.E[k] - ref).cwiseAbs().maxCoeff() / finf);
  }
  r.pi = projection_pi(s, t, d, ctx.system(), f);
  r.residual_pi = (r.E.back() - r.pi).cwiseAbs().maxCoeff() / finf;
  return r;
}

const char* term_name(Term t) {
  static const char* names[] = {"U1", "U2", "U3", "U4", "V1", "V2", "V3", "V4", "W1", "W2", "W3", "W4"};
  return names[static_cast<int>(t)];
}

cplx BcrDecomposition::total() const { return e0 + sum(U) + sum(V) + sum(W); }

namespace {

enum Kind { Spa = 0, Dpa = 1, Block = 2, TopFn = 3 };

struct Piece {
  int cube = -1;
  Kind kind = Spa;
  std::vector<SparseFn> fns;
  std::vector<cplx> coef;
};

struct Applied {
  std::vector<CVec> Tv;
};

Applied apply_piece(const KernelOperator& T, const Piece& p) {
  Applied a;
  for (const auto& v : p.fns) a.Tv.push_back(T.apply(v));
  return a;
}

struct PairValue {
  cplx value = 0.0;  // sum_kl cL_k cR_l <u_k, T v_l>
  cplx lin = 0.0;    // sum_kl cL_k <u_k, T v_l>
  double raw = 0.0;
};

cplx dot_mu(const PointSpace& s, const SparseFn& u, const CVec& Tv) {
  cplx acc = 0.0;
  for (std::size_t a = 0; a < u.idx.size(); ++a) acc += u.val[a] * s.weight(u.idx[a]) * Tv[u.idx[a]];
  return acc;
}

PairValue pair_value(const PointSpace& s, const Piece& L, const Piece& R, const Applied& A) {
  PairValue pv;
  for (std::size_t k = 0; k < L.fns.size(); ++k)
    for (std::size_t l = 0; l < R.fns.size(); ++l) {
      cplx v = dot_mu(s, L.fns[k], A.Tv[l]);
      pv.raw = std::max(pv.raw, std::abs(v));
      pv.lin += L.coef[k] * v;
      pv.value += L.coef[k] * R.coef[l] * v;
    }
  return pv;
}

// D-side pieces at generation j: spa wavelets with <F, phi^s> and buffer functions xi_Q F
std::vector<Piece> d_pieces(const BcrContext& ctx, int side, const CVec& F, int j) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const BcrSide& S = ctx.side(side);
  const StoppingDecomposition& d = *S.d;
  std::vector<Piece> out;
  if (j >= static_cast<int>(t.generations.size())) return out;
  for (int Q : t.generations[j]) {
    if (d.cls[Q] == CubeClass::Spa) {
      const WaveletEntry* e = S.haar.find(Q);
      if (!e) continue;
      Piece p;
      p.cube = Q;
      p.kind = Spa;
      p.fns = S.theta[Q];
      p.coef = analysis(s, t, *e, F);
      out.push_back(std::move(p));
    } else if (d.cls[Q] == CubeClass::Buffer) {
      Piece p;
      p.cube = Q;
      p.kind = Dpa;
      p.fns.push_back(buffer_function(s, t, d, ctx.system(), Q, F));
      p.coef.push_back(1.0);
      out.push_back(std::move(p));
    }
  }
  return out;
}

// E-side blocks at generation j: b 1_R with [G]_R / [b]_R
std::vector<Piece> block_pieces(const BcrContext& ctx, int side, const CVec& G, int j) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const BcrSide& S = ctx.side(side);
  const StoppingDecomposition& d = *S.d;
  std::vector<Piece> out;
  if (j >= static_cast<int>(t.generations.size())) return out;
  for (int R : t.generations[j]) {
    if (!d.retained(R)) continue;
    Piece p;
    p.cube = R;
    p.kind = Block;
    p.fns.push_back(S.block[R]);
    const auto& M = t.cube(R).members;
    p.coef.push_back(integral(s, M, G) / integral(s, M, d.b));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Piece> top_pieces(const BcrContext& ctx, int side, const CVec& G) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const BcrSide& S = ctx.side(side);
  std::vector<Piece> out;
  for (int P : S.d->tops) {
    Piece p;
    p.cube = P;
    p.kind = TopFn;
    p.fns.push_back(S.top_b[P]);
    p.coef.push_back(average(s, t.cube(P).members, G));
    out.push_back(std::move(p));
  }
  return out;
}

// sum_j <D_j^A F, T E_j^B G> with sub-terms; contributions recorded with (left, right) = (D cube, E cube)
// when `record` is set
void v_type(const BcrContext& ctx, int sideA, const CVec& F, int sideB, const CVec& G, const KernelOperator& T,
            std::array<cplx, 4>& acc, VSplit& split, std::vector<Contribution>* record, Term base) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const StoppingDecomposition& dB = *ctx.side(sideB).d;
  const int g0 = t.cube(dB.root).gen;
  std::vector<Piece> tops = top_pieces(ctx, sideB, G);
  std::vector<Applied> tops_applied;
  for (const auto& p : tops) tops_applied.push_back(apply_piece(T, p));
  for (int j = g0; j <= t.depth(); ++j) {
    std::vector<Piece> D = d_pieces(ctx, sideA, F, j);
    if (D.empty()) continue;
    std::vector<Piece> B = block_pieces(ctx, sideB, G, j);
    std::vector<Applied> BA;
    for (const auto& p : B) BA.push_back(apply_piece(T, p));
    // b^B times the indicator of the pa B cubes of generation j
    CVec h = CVec::Zero(s.size());
    for (const auto& p : B)
      for (std::size_t k = 0; k < p.fns[0].idx.size(); ++k) h[p.fns[0].idx[k]] = p.fns[0].val[k];
    const CVec Th = T.apply(h);
    for (const auto& L : D) {
      const bool spa = L.kind == Spa;
      const int term = spa ? 0 : 2;  // V1 / V3
      const bool pa_b = dB.retained(L.cube);
      cplx beta_sum = 0.0;
      double beta_abs = 0.0;
      for (std::size_t r = 0; r < B.size(); ++r) {
        PairValue pv = pair_value(s, L, B[r], BA[r]);
        acc[term] += pv.value;
        if (record) record->push_back({static_cast<Term>(static_cast<int>(base) + term), L.cube, B[r].cube, pv.value, pv.raw});
        if (!spa) continue;
        if (!pa_b) {
          split.v11 += pv.value;
        } else if (B[r].cube != L.cube) {
          split.v13 += pv.value;
          beta_sum += pv.lin;
          beta_abs += std::abs(pv.lin);
        } else {
          cplx corr = 0.0;
          for (std::size_t k = 0; k < L.fns.size(); ++k) corr += L.coef[k] * dot_mu(s, L.fns[k], Th);
          cplx beta_qq = pv.lin - corr;
          split.v13 += beta_qq * B[r].coef[0];
          split.v12 += corr * B[r].coef[0];
          beta_sum += beta_qq;
          beta_abs += std::abs(beta_qq) + std::abs(corr);
        }
      }
      if (spa && pa_b && beta_abs > 0) {
        split.beta_cancellation = std::max(split.beta_cancellation, std::abs(beta_sum) / beta_abs);
        ++split.beta_cubes;
      }
      const int tterm = spa ? 1 : 3;  // V2 / V4
      for (std::size_t r = 0; r < tops.size(); ++r) {
        if (t.cube(tops[r].cube).gen > j) continue;
        PairValue pv = pair_value(s, L, tops[r], tops_applied[r]);
        acc[tterm] += pv.value;
        if (record)
          record->push_back({static_cast<Term>(static_cast<int>(base) + tterm), L.cube, tops[r].cube, pv.value, pv.raw});
      }
    }
  }
}

double l2(const PointSpace& s, const CVec& f) {
  double acc = 0.0;
  for (int x = 0; x < s.size(); ++x) acc += std::norm(f[x]) * s.weight(x);
  return std::sqrt(acc);
}

}  // namespace

BcrDecomposition bcr_terms(const BcrContext& ctx, const CVec& f, const CVec& g) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const KernelOperator& T = ctx.op();
  const StoppingDecomposition& d1 = *ctx.side(1).d;
  const StoppingDecomposition& d2 = *ctx.side(2).d;
  BcrDecomposition dec;
  const int g0 = t.cube(d1.root).gen;
  const auto& root_members = t.cube(d1.root).members;

  dec.e0 = average(s, root_members, f) * average(s, root_members, g) * T.pairing(d2.b, d1.b);

  // U: equal generations, both sides differences
  for (int j = g0; j <= t.depth(); ++j) {
    std::vector<Piece> D2 = d_pieces(ctx, 2, f, j);
    std::vector<Piece> D1 = d_pieces(ctx, 1, g, j);
    if (D2.empty() || D1.empty()) continue;
    std::vector<Applied> A1;
    for (const auto& p : D1) A1.push_back(apply_piece(T, p));
    for (const auto& L : D2)
      for (std::size_t r = 0; r < D1.size(); ++r) {
        PairValue pv = pair_value(s, L, D1[r], A1[r]);
        int term = (L.kind == Spa ? 0 : 2) + (D1[r].kind == Spa ? 0 : 1);
        dec.U[term] += pv.value;
        dec.contributions.push_back({static_cast<Term>(term), L.cube, D1[r].cube, pv.value, pv.raw});
      }
  }

  v_type(ctx, 2, f, 1, g, T, dec.V, dec.v_split, &dec.contributions, Term::V1);

  // W directly: <E_j^2 f, T D_j^1 g>, pieces of E on the left
  {
    std::vector<Piece> tops2 = top_pieces(ctx, 2, f);
    for (int j = g0; j <= t.depth(); ++j) {
      std::vector<Piece> D1 = d_pieces(ctx, 1, g, j);
      if (D1.empty()) continue;
      std::vector<Piece> B2 = block_pieces(ctx, 2, f, j);
      std::vector<Applied> A1;
      for (const auto& p : D1) A1.push_back(apply_piece(T, p));
      for (std::size_t r = 0; r < D1.size(); ++r) {
        const int off = D1[r].kind == Spa ? 0 : 2;
        for (const auto& L : B2) {
          PairValue pv = pair_value(s, L, D1[r], A1[r]);
          dec.W[off] += pv.value;
          dec.contributions.push_back({static_cast<Term>(static_cast<int>(Term::W1) + off), L.cube, D1[r].cube,
                                       pv.value, pv.raw});
        }
        for (const auto& L : tops2) {
          if (t.cube(L.cube).gen > j) continue;
          PairValue pv = pair_value(s, L, D1[r], A1[r]);
          dec.W[off + 1] += pv.value;
          dec.contributions.push_back({static_cast<Term>(static_cast<int>(Term::W2) + off), L.cube, D1[r].cube,
                                       pv.value, pv.raw});
        }
      }
    }
  }

  // W by duality: the V computation with the sides exchanged and T replaced by T*
  v_type(ctx, 1, g, 2, f, ctx.adjoint(), dec.W_dual, dec.w_dual_split, nullptr, Term::V1);

  EjDj e2 = e_and_d(ctx, 2, f);
  EjDj e1 = e_and_d(ctx, 1, g);
  for (std::size_t k = 0; k < e1.D.size(); ++k) dec.W_dense += T.pairing(e2.E[k], e1.D[k]);
  dec.mean_zero = std::max(e1.mean_zero, e2.mean_zero);
  dec.residual71 = std::max(e1.residual71, e2.residual71);

  dec.exact = T.pairing(e2.pi, e1.pi);
  dec.scale = l2(s, f) * l2(s, g) * T.l2_norm();
  dec.residual = dec.scale > 0 ? std::abs(dec.exact - dec.total()) / dec.scale : 0.0;
  const cplx W = dec.sum(dec.W);
  const double wden = std::max(std::abs(W), 1e-12 * dec.scale);
  dec.w_duality = wden > 0 ? std::abs(W - dec.sum(dec.W_dual)) / wden : 0.0;
  dec.w_dense_gap = wden > 0 ? std::abs(W - dec.W_dense) / wden : 0.0;
  return dec;
}

AppendixBReport appendix_b_ratios(const BcrContext& ctx, const CVec& f, const CVec& g) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const KernelOperator& T = ctx.op();
  const PairMeasure& pm = ctx.pair_measure();
  const double a = T.alpha();
  const StoppingDecomposition& d1 = *ctx.side(1).d;
  AppendixBReport rep;
  rep.ratio.fill(0.0);
  rep.pairs.fill(0);
  const CVec fn = f / std::max(f.cwiseAbs().maxCoeff(), 1e-300);
  const CVec gn = g / std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  auto note = [&](int k, double coef, double denom) {
    if (!(denom > 0)) return;
    rep.ratio[k] = std::max(rep.ratio[k], coef / denom);
    ++rep.pairs[k];
  };
  // b^1 1_P for the tops of side 1
  std::vector<Piece> tops = top_pieces(ctx, 1, gn);
  std::vector<Applied> tops_applied, tops_block_applied;
  std::vector<Piece> tops_block;
  for (const auto& p : tops) {
    tops_applied.push_back(apply_piece(T, p));
    Piece q = p;
    q.fns[0] = restrict_to(d1.b, t.cube(p.cube).members);
    tops_block_applied.push_back(apply_piece(T, q));
    tops_block.push_back(std::move(q));
  }
  const int g0 = t.cube(d1.root).gen;
  for (int j = g0; j <= t.depth(); ++j) {
    std::vector<Piece> D2 = d_pieces(ctx, 2, fn, j);
    if (D2.empty()) continue;
    std::vector<Piece> D1 = d_pieces(ctx, 1, gn, j);
    std::vector<Piece> B1 = block_pieces(ctx, 1, gn, j);
    std::vector<Applied> A1, AB;
    for (const auto& p : D1) A1.push_back(apply_piece(T, p));
    for (const auto& p : B1) AB.push_back(apply_piece(T, p));
    for (const auto& L : D2) {
      const double mq = std::sqrt(t.cube(L.cube).mass);
      for (std::size_t r = 0; r < D1.size(); ++r) {
        CoefficientWeight w = alpha_weight(s, t, pm, L.cube, D1[r].cube, a);
        const double mr = std::sqrt(t.cube(D1[r].cube).mass);
        double raw = pair_value(s, L, D1[r], A1[r]).raw;
        if (L.kind == Spa && D1[r].kind == Spa) note(0, raw, w.alpha);
        if (L.kind == Spa && D1[r].kind == Dpa) note(1, raw, w.alpha * mr);
        if (L.kind == Dpa && D1[r].kind == Dpa) note(2, raw, w.alpha * mq * mr);
      }
      for (std::size_t r = 0; r < B1.size(); ++r) {
        CoefficientWeight w = alpha_weight(s, t, pm, L.cube, B1[r].cube, a);
        const double mr = std::sqrt(t.cube(B1[r].cube).mass);
        double raw = pair_value(s, L, B1[r], AB[r]).raw;
        if (L.kind == Dpa) note(3, raw, w.alpha * mq * mr);
        if (L.kind == Spa) note(4, raw, w.alpha * mr);
      }
      for (std::size_t r = 0; r < tops.size(); ++r) {
        const Cube& P = t.cube(tops[r].cube);
        if (P.gen > j) continue;
        CoefficientWeight w = alpha_weight(s, t, pm, L.cube, P.id, a);
        if (!(w.rho >= P.length * (1.0 - 1e-12))) continue;
        const double mp = std::sqrt(P.mass);
        if (L.kind == Dpa) note(5, pair_value(s, L, tops[r], tops_applied[r]).raw, w.alpha * mq * mp);
        if (L.kind == Spa) {
          note(6, pair_value(s, L, tops[r], tops_applied[r]).raw, w.alpha * mp);
          note(7, pair_value(s, L, tops_block[r], tops_block_applied[r]).raw, w.alpha * mp);
        }
      }
    }
  }
  for (int k = 0; k < 8; ++k)
    if (rep.pairs[k] == 0) rep.ratio[k] = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

std::vector<SummingRow> summing_lemma(const PointSpace& s, const DyadicTree& t, const PairMeasure& pm,
                                      double alpha_exp, bool lemma72, int gen_lo, int gen_hi, int pmax) {
  std::vector<SummingRow> rows;
  for (int g = std::max(gen_lo, 0); g <= std::min(gen_hi, t.depth()); ++g) {
    for (int p = 0; p <= pmax; ++p) {
      const int other = lemma72 ? g + p : g - p;
      if (other < 0 || other > t.depth()) continue;
      SummingRow row;
      row.ref_gen = g;
      row.p = p;
      for (int ref : t.generations[g]) {
        if (t.cube(ref).gen != g) continue;
        double sum = 0.0;
        for (int c : t.generations[other]) {
          if (t.cube(c).gen != other) continue;
          PairGeometry geo = pair_geometry(s, t, pm, ref, c);
          // fine-to-coarse sums use the reference length, coarse sums the larger cube's length
          const double lR = lemma72 ? t.cube(ref).length : t.cube(c).length;
          const double lQ = lemma72 ? t.cube(c).length : t.cube(ref).length;
          if (!(geo.rho >= lR * (1.0 - 1e-12))) continue;
          sum += t.cube(c).mass * std::pow(lQ / geo.rho, alpha_exp) / geo.mu;
        }
        row.max_sum = std::max(row.max_sum, sum);
        ++row.refs;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<CoefficientWeight> contribution_weights(const BcrContext& ctx, const BcrDecomposition& dec) {
  const PointSpace& s = ctx.space();
  const DyadicTree& t = ctx.tree();
  const PairMeasure& pm = ctx.pair_measure();
  const double a = ctx.op().alpha();
  std::unordered_map<long long, CoefficientWeight> cache;
  std::vector<CoefficientWeight> out;
  out.reserve(dec.contributions.size());
  const long long m = static_cast<long long>(t.cubes.size());
  for (const auto& c : dec.contributions) {
    int q = std::min(c.left, c.right), r = std::max(c.left, c.right);
    long long key = q * m + r;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, alpha_weight(s, t, pm, q, r, a)).first;
    CoefficientWeight w = it->second;
    w.Q = c.left;
    w.R = c.right;
    out.push_back(w);
  }
  return out;
}

CompressionPoint compressed_pairing(const BcrDecomposition& dec, const std::vector<CoefficientWeight>& w,
                                    double tau) {
  if (!(tau >= 0)) throw InvalidArgument("tau must be nonnegative");
  if (w.size() != dec.contributions.size()) throw InvalidArgument("weights do not match contributions");
  CompressionPoint pt;
  pt.tau = tau;
  cplx exact = dec.e0, kept = dec.e0;
  double dropped_abs = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const cplx v = dec.contributions[k].value;
    exact += v;
    if (w[k].defined) ++pt.weighted;
    const bool drop = w[k].defined && !w[k].near && w[k].alpha < tau;
    if (drop) {
      ++pt.dropped;
      dropped_abs += std::abs(v);
    } else {
      kept += v;
    }
  }
  pt.value = kept;
  pt.kept_fraction = pt.weighted > 0 ? 1.0 - static_cast<double>(pt.dropped) / pt.weighted : 1.0;
  pt.abs_error = std::abs(kept - exact);
  const double ex = std::abs(exact);
  pt.relative_error = ex > 0 ? pt.abs_error / ex : pt.abs_error;
  pt.normalized_error = dec.scale > 0 ? pt.abs_error / dec.scale : pt.abs_error;
  pt.dropped_mass = ex > 0 ? dropped_abs / ex : dropped_abs;
  return pt;
}

std::vector<double> default_tau_grid(const std::vector<CoefficientWeight>& w, int points) {
  if (points < 2) throw InvalidArgument("tau grid needs at least two points");
  std::vector<double> far;
  for (const auto& x : w)
    if (x.defined && !x.near) far.push_back(x.alpha);
  std::sort(far.begin(), far.end());
  std::vector<double> taus;
  if (far.empty()) {
    taus.assign(points, 0.0);
    return taus;
  }
  const int m = static_cast<int>(far.size());
  for (int k = 0; k < points - 1; ++k) {
    if (k == 0) {
      taus.push_back(2.0 * far.back());
      continue;
    }
    const double frac = 1.0 - static_cast<double>(k) / (points - 1);
    int idx = std::clamp(static_cast<int>(std::floor(frac * m)), 0, m - 1);
    taus.push_back(far[idx]);
  }
  taus.push_back(0.0);
  return taus;
}

std::vector<CompressionPoint> compression_sweep(const BcrDecomposition& dec, const std::vector<CoefficientWeight>& w,
                                                const std::vector<double>& taus) {
  std::vector<CompressionPoint> out;
  for (double tau : taus) out.push_back(compressed_pairing(dec, w, tau));
  return out;
}

}  // namespace ltb
