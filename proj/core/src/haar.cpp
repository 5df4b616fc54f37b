#include "ltb/haar.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ltb {

cplx integral(const PointSpace& s, const std::vector<int>& pts, const CVec& f) {
  cplx acc = 0.0;
  for (int x : pts) acc += f[x] * s.weight(x);
  return acc;
}

cplx average(const PointSpace& s, const std::vector<int>& pts, const CVec& f) {
  return integral(s, pts, f) / s.mass(pts);
}

double average_abs_pow(const PointSpace& s, const std::vector<int>& pts, const CVec& f, double p) {
  double acc = 0.0, m = 0.0;
  for (int x : pts) {
    acc += std::pow(std::abs(f[x]), p) * s.weight(x);
    m += s.weight(x);
  }
  return acc / m;
}

bool is_spa(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, double threshold) {
  const Cube& Q = t.cube(cube);
  if (std::abs(average(s, Q.members, b)) < threshold) return false;
  for (int ch : Q.children)
    if (std::abs(average(s, t.cube(ch).members, b)) < threshold) return false;
  return true;
}

namespace {

double weighted_norm(const Eigen::RowVectorXcd& v, const std::vector<double>& m) {
  double acc = 0.0;
  for (int k = 0; k < v.size(); ++k) acc += std::norm(v[k]) * m[k];
  return std::sqrt(acc);
}

}  // namespace

WaveletEntry build_adapted_haar(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube,
                                double threshold) {
  const Cube& Q = t.cube(cube);
  WaveletEntry e;
  e.cube = cube;
  e.children = Q.children;
  e.bmean = average(s, Q.members, b);
  if (std::abs(e.bmean) < threshold)
    throw Degenerate("cube " + std::to_string(cube) + " is not strongly pseudo-accretive: |[b]_Q| below threshold");
  double absmean = average_abs_pow(s, Q.members, b, 1.0);
  e.accretivity = std::max(absmean, 1.0 / std::abs(e.bmean));
  for (int ch : Q.children) {
    const Cube& C = t.cube(ch);
    e.child_mass.push_back(C.mass);
    cplx bm = average(s, C.members, b);
    if (std::abs(bm) < threshold)
      throw Degenerate("cube " + std::to_string(cube) + " is not strongly pseudo-accretive: child mean below threshold");
    e.child_bmean.push_back(bm);
    e.accretivity = std::max(e.accretivity, 1.0 / std::abs(bm));
  }
  e.cQ = 1.0 / std::sqrt(e.bmean);
  const int N = static_cast<int>(Q.children.size());
  if (N < 2) {
    e.w.resize(0, N);
    e.phi.resize(0, N);
    e.phit.resize(0, N);
    return e;
  }
  const auto& m = e.child_mass;
  auto dot = [&](const RVec& u, const RVec& v) {
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += u[k] * v[k] * m[k];
    return acc;
  };
  // Gram-Schmidt of {1_Q, 1_Q1, ..., 1_Q(N-1)}, constant direction dropped
  std::vector<RVec> basis;
  RVec one = RVec::Ones(N);
  basis.push_back(one / std::sqrt(dot(one, one)));
  e.w.resize(N - 1, N);
  for (int k = 0; k < N - 1; ++k) {
    RVec v = RVec::Zero(N);
    v[k] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const RVec& u : basis) v -= dot(v, u) * u;
    v /= std::sqrt(dot(v, v));
    basis.push_back(v);
    e.w.row(k) = v.transpose();
  }
  auto B = [&](const Eigen::RowVectorXcd& f, const Eigen::RowVectorXcd& g) {
    cplx acc = 0.0;
    for (int k = 0; k < N; ++k) acc += f[k] * e.child_bmean[k] * g[k] * m[k];
    return acc;
  };
  Eigen::RowVectorXcd onec = Eigen::RowVectorXcd::Ones(N);
  const cplx B11 = B(onec, onec);
  e.phit.resize(N - 1, N);
  for (int k = 0; k < N - 1; ++k) {
    Eigen::RowVectorXcd wk = e.w.row(k).cast<cplx>();
    e.phit.row(k) = wk - (B(wk, onec) / B11) * onec;
  }
  CMat G(N - 1, N - 1);
  for (int a = 0; a < N - 1; ++a)
    for (int c = 0; c < N - 1; ++c) G(a, c) = B(e.phit.row(a), e.phit.row(c));
  Eigen::JacobiSVD<CMat> svd(G);
  const auto& sv = svd.singularValues();
  e.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(e.condition <= 1e12))
    throw Degenerate("adapted Gram matrix numerically singular on cube " + std::to_string(cube));
  CMat Ginv = G.fullPivLu().inverse();
  // phi^s = sum_u phit^u (G^-1)_{us}
  e.phi = Ginv.transpose() * e.phit;
  CMat H(N - 1, N - 1);
  for (int a = 0; a < N - 1; ++a)
    for (int c = 0; c < N - 1; ++c) {
      cplx acc = 0.0;
      for (int k = 0; k < N; ++k) acc += std::conj(e.phit(a, k)) * e.phit(c, k) * m[k];
      H(a, c) = acc;
    }
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  e.frame_lower = es.eigenvalues()(0);
  e.frame_upper = es.eigenvalues()(N - 2);
  e.norm_bound = 0.0;
  for (int k = 0; k < N - 1; ++k) {
    e.norm_bound = std::max(e.norm_bound, weighted_norm(e.phi.row(k), m) + weighted_norm(e.phit.row(k), m));
  }
  return e;
}

std::vector<cplx> analysis(const PointSpace& s, const DyadicTree& t, const WaveletEntry& e, const CVec& f) {
  const int N = static_cast<int>(e.children.size());
  std::vector<cplx> F(N);
  for (int k = 0; k < N; ++k) F[k] = integral(s, t.cube(e.children[k]).members, f);
  std::vector<cplx> a(e.count(), 0.0);
  for (int r = 0; r < e.count(); ++r)
    for (int k = 0; k < N; ++k) a[r] += F[k] * e.phi(r, k);
  return a;
}

SparseFn expand(const DyadicTree& t, const WaveletEntry& e, const Eigen::RowVectorXcd& v, const CVec* b) {
  const Cube& Q = t.cube(e.cube);
  SparseFn out;
  out.idx = Q.members;
  out.val.reserve(Q.members.size());
  const auto& own = t.owner[Q.gen + 1];
  for (int x : Q.members) {
    int k = 0;
    while (e.children[k] != own[x]) ++k;
    cplx val = v[k];
    if (b) val *= (*b)[x];
    out.val.push_back(val);
  }
  return out;
}

SparseFn synthesis(const DyadicTree& t, const WaveletEntry& e, const std::vector<cplx>& a, const CVec* b) {
  Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Zero(static_cast<int>(e.children.size()));
  for (int r = 0; r < e.count(); ++r) v += a[r] * e.phit.row(r);
  return expand(t, e, v, b);
}

SparseFn classical_expectation(const PointSpace& s, const DyadicTree& t, int cube, const CVec& f) {
  const Cube& Q = t.cube(cube);
  SparseFn out;
  out.idx = Q.members;
  out.val.assign(Q.members.size(), average(s, Q.members, f));
  return out;
}

SparseFn classical_difference(const PointSpace& s, const DyadicTree& t, int cube, const CVec& f) {
  const Cube& Q = t.cube(cube);
  SparseFn out;
  out.idx = Q.members;
  out.val.assign(Q.members.size(), 0.0);
  if (Q.children.size() < 2) return out;
  const cplx mq = average(s, Q.members, f);
  const auto& own = t.owner[Q.gen + 1];
  std::vector<std::pair<int, cplx>> cm;
  for (int ch : Q.children) cm.emplace_back(ch, average(s, t.cube(ch).members, f));
  for (std::size_t k = 0; k < Q.members.size(); ++k) {
    int c = own[Q.members[k]];
    for (const auto& pr : cm)
      if (pr.first == c) out.val[k] = pr.second - mq;
  }
  return out;
}

SparseFn adapted_expectation(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, const CVec& f) {
  const Cube& Q = t.cube(cube);
  SparseFn out;
  out.idx = Q.members;
  out.val.assign(Q.members.size(), integral(s, Q.members, f) / integral(s, Q.members, b));
  return out;
}

SparseFn adapted_difference(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, const CVec& f,
                            double threshold) {
  const Cube& Q = t.cube(cube);
  if (!is_spa(s, t, b, cube, threshold))
    throw Degenerate("cube " + std::to_string(cube) + " is not strongly pseudo-accretive");
  SparseFn out;
  out.idx = Q.members;
  out.val.assign(Q.members.size(), 0.0);
  if (Q.children.size() < 2) return out;
  const cplx eq = integral(s, Q.members, f) / integral(s, Q.members, b);
  const auto& own = t.owner[Q.gen + 1];
  std::vector<std::pair<int, cplx>> cm;
  for (int ch : Q.children) {
    const auto& M = t.cube(ch).members;
    cm.emplace_back(ch, integral(s, M, f) / integral(s, M, b));
  }
  for (std::size_t k = 0; k < Q.members.size(); ++k) {
    int c = own[Q.members[k]];
    for (const auto& pr : cm)
      if (pr.first == c) out.val[k] = pr.second - eq;
  }
  return out;
}

ParsevalReport classical_parseval(const PointSpace& s, const DyadicTree& t, const CVec& f) {
  ParsevalReport rep;
  const int n = s.size();
  const cplx mean = average(s, t.cube(0).members, f);
  CVec g = f.array() - mean;
  for (int x = 0; x < n; ++x) rep.energy += std::norm(g[x]) * s.weight(x);
  CVec acc = CVec::Zero(n);
  for (const Cube& Q : t.cubes) {
    SparseFn d = classical_difference(s, t, Q.id, f);
    for (std::size_t k = 0; k < d.idx.size(); ++k) {
      rep.difference_sum += std::norm(d.val[k]) * s.weight(d.idx[k]);
      acc[d.idx[k]] += d.val[k];
    }
  }
  rep.reconstruction_residual = (g - acc).cwiseAbs().maxCoeff();
  return rep;
}

HaarSystem build_haar_system(const PointSpace& s, const DyadicTree& t, const CVec& b, const std::vector<int>& cubes,
                             double threshold) {
  HaarSystem sys;
  sys.slot.assign(t.cubes.size(), -1);
  for (int id : cubes) {
    if (t.cube(id).children.size() < 2) continue;
    sys.slot[id] = static_cast<int>(sys.entries.size());
    sys.entries.push_back(build_adapted_haar(s, t, b, id, threshold));
  }
  return sys;
}

double carleson_ratio(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys, const CVec& f) {
  double num = 0.0, den = 0.0;
  for (const auto& e : sys.entries)
    for (const cplx& a : analysis(s, t, e, f)) num += std::norm(a);
  for (int x = 0; x < s.size(); ++x) den += std::norm(f[x]) * s.weight(x);
  return den > 0 ? num / den : 0.0;
}

CVec apply_L(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys, const std::vector<cplx>& c,
             const CVec& f, const CVec* b) {
  CVec out = CVec::Zero(s.size());
  for (std::size_t i = 0; i < sys.entries.size(); ++i) {
    const auto& e = sys.entries[i];
    std::vector<cplx> a = analysis(s, t, e, f);
    for (auto& v : a) v *= c[i];
    SparseFn g = synthesis(t, e, a, b);
    for (std::size_t k = 0; k < g.idx.size(); ++k) out[g.idx[k]] += g.val[k];
  }
  return out;
}

namespace {

double lnu(const PointSpace& s, const CVec& f, double nu) {
  double acc = 0.0;
  for (int x = 0; x < s.size(); ++x) acc += std::pow(std::abs(f[x]), nu) * s.weight(x);
  return std::pow(acc, 1.0 / nu);
}

}  // namespace

LNormReport empirical_L_norm(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys,
                             const std::vector<cplx>& c, double nu, int trials, std::uint64_t seed, const CVec* b) {
  LNormReport rep;
  rep.nu = nu;
  const int n = s.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(t.cubes.size()) - 1);
  for (int k = 0; k < trials; ++k) {
    CVec f(n);
    switch (k % 3) {
      case 0:
        for (int x = 0; x < n; ++x) f[x] = g(rng);
        break;
      case 1:
        for (int x = 0; x < n; ++x) f[x] = g(rng) < 0 ? -1.0 : 1.0;
        break;
      default: {
        f.setZero();
        const Cube& Q = t.cube(pick(rng));
        for (int x : Q.members) f[x] = 1.0;
        break;
      }
    }
    double nf = lnu(s, f, nu);
    if (nf <= 0) continue;
    rep.norm = std::max(rep.norm, lnu(s, apply_L(s, t, sys, c, f, b), nu) / nf);
    ++rep.trials;
  }
  return rep;
}

double neighbor_pair_constant(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys,
                              const std::vector<cplx>& c, double p, double q, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  double best = 0.0;
  const int n = s.size();
  for (const Cube& Q : t.cubes) {
    for (int rid : Q.neighbors) {
      const Cube& R = t.cube(rid);
      for (int k = 0; k < trials; ++k) {
        CVec f = CVec::Zero(n), h = CVec::Zero(n);
        for (int x : Q.members) f[x] = g(rng);
        for (int x : R.members) h[x] = g(rng);
        CVec lf = apply_L(s, t, sys, c, f);
        cplx pr = 0.0;
        for (int x : R.members) pr += lf[x] * h[x] * s.weight(x);
        double den = std::pow(Q.mass, 1.0 - 1.0 / p - 1.0 / q) * lnu(s, f, p) * lnu(s, h, q);
        if (den > 0) best = std::max(best, std::abs(pr) / den);
      }
    }
  }
  return best;
}

}  // namespace ltb
