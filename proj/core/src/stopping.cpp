#include "ltb/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltb/haar.hpp"

namespace ltb {

const char* class_name(CubeClass c) {
  switch (c) {
    case CubeClass::Spa: return "spa";
    case CubeClass::Buffer: return "buffer";
    case CubeClass::Top: return "top";
    case CubeClass::Inside: return "inside";
    case CubeClass::Outside: return "outside";
  }
  return "unknown";
}

RVec maximal_function(const PointSpace& s, const CVec& b) {
  const int n = s.size();
  RVec M = RVec::Zero(n);
  std::vector<double> best(n);
  for (int c = 0; c < n; ++c) {
    const auto& o = s.order(c);
    const auto& d = s.sorted_dist(c);
    double num = 0.0, den = 0.0;
    std::vector<double> means(n, -1.0);
    for (int k = 0; k < n; ++k) {
      num += std::abs(b[o[k]]) * s.weight(o[k]);
      den += s.weight(o[k]);
      if (k == n - 1 || d[k + 1] > d[k]) means[k] = num / den;
    }
    double run = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      if (means[k] >= 0) run = std::max(run, means[k]);
      best[k] = run;
    }
    for (int k = 0; k < n; ++k) M[o[k]] = std::max(M[o[k]], best[k]);
  }
  return M;
}

namespace {

// sup over unions E of same-generation cubes with Q inside E inside Q-hat of [F]_E, F >= 0
double sup_over_unions(const PointSpace& s, const DyadicTree& t, int cube, const RVec& F) {
  const Cube& Q = t.cube(cube);
  double num = 0.0;
  for (int x : Q.members) num += F[x] * s.weight(x);
  double den = Q.mass;
  std::vector<std::pair<double, double>> parts;
  for (int nb : Q.neighbors) {
    double a = 0.0;
    for (int x : t.cube(nb).members) a += F[x] * s.weight(x);
    parts.emplace_back(a, t.cube(nb).mass);
  }
  std::sort(parts.begin(), parts.end(), [](const auto& u, const auto& v) { return u.first * v.second > v.first * u.second; });
  double best = num / den;
  for (const auto& pr : parts) {
    num += pr.first;
    den += pr.second;
    best = std::max(best, num / den);
  }
  return best;
}

}  // namespace

StoppingDecomposition run_stopping(const PointSpace& s, const DyadicTree& t, int root, const CVec& b, const CVec& Tb,
                                   double p, double qprime, const StoppingParams& params) {
  if (!(params.c_stop > 0)) throw InvalidArgument("stopping constant must be positive");
  if (!(params.delta_stop > 0)) throw InvalidArgument("stopping threshold must be positive");
  const int n = s.size();
  StoppingDecomposition d;
  d.root = root;
  d.delta_stop = params.delta_stop;
  d.c_stop = params.c_stop;
  d.maximal_variant = params.maximal_variant;
  d.p = p;
  d.qprime = qprime;
  d.cls.assign(t.cubes.size(), CubeClass::Outside);
  d.functional.assign(t.cubes.size(), std::numeric_limits<double>::quiet_NaN());
  d.top_of.assign(n, -1);
  d.b = CVec::Zero(n);
  for (int x : t.cube(root).members) d.b[x] = b[x];

  RVec bp(n), tq(n), mbp;
  for (int x = 0; x < n; ++x) {
    bp[x] = std::pow(std::abs(b[x]), p);
    tq[x] = std::pow(std::abs(Tb[x]), qprime);
  }
  if (params.maximal_variant) {
    RVec M = maximal_function(s, d.b);
    mbp = M.array().pow(p);
  }
  d.mean53.assign(t.cubes.size(), std::numeric_limits<double>::quiet_NaN());
  auto functional = [&](int id) {
    const Cube& Q = t.cube(id);
    double a = 0.0, c = 0.0;
    for (int x : Q.members) {
      a += bp[x] * s.weight(x);
      c += tq[x] * s.weight(x);
    }
    a /= Q.mass;
    c /= Q.mass;
    d.mean53[id] = a + c;
    if (params.maximal_variant) return c + sup_over_unions(s, t, id, mbp);
    return a + c;
  };
  auto stops = [&](int id) {
    double F = functional(id);
    d.functional[id] = F;
    return std::abs(average(s, t.cube(id).members, b)) < params.delta_stop || F > params.c_stop;
  };

  d.degenerate = stops(root);
  d.cls[root] = CubeClass::Spa;
  std::vector<int> stack(t.cube(root).children.rbegin(), t.cube(root).children.rend());
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (stops(id)) {
      d.cls[id] = CubeClass::Top;
      d.tops.push_back(id);
      for (int dd : t.descendants(id, true)) d.cls[dd] = CubeClass::Inside;
      for (int x : t.cube(id).members) d.top_of[x] = id;
    } else {
      d.cls[id] = CubeClass::Spa;
      const auto& ch = t.cube(id).children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
  }
  std::sort(d.tops.begin(), d.tops.end());
  double top_mass = 0.0;
  for (int P : d.tops) top_mass += t.cube(P).mass;
  d.eps = 1.0 - top_mass / t.cube(root).mass;
  for (std::size_t id = 0; id < t.cubes.size(); ++id) {
    if (d.cls[id] != CubeClass::Spa) continue;
    bool buf = false;
    for (int ch : t.cube(static_cast<int>(id)).children)
      if (d.cls[ch] == CubeClass::Top) buf = true;
    if (buf) {
      d.cls[id] = CubeClass::Buffer;
      d.buffer.push_back(static_cast<int>(id));
    } else {
      d.omega.push_back(static_cast<int>(id));
    }
    if (static_cast<int>(id) != root) d.mean_bound_retained = std::max(d.mean_bound_retained, d.mean53[id]);
  }
  for (int P : d.tops) d.mean_bound_tops = std::max(d.mean_bound_tops, d.mean53[P]);
  return d;
}

StoppingDecomposition stopping_for_system(const AccretiveSystem& sys, const KernelOperator& op, int side, int root,
                                          StoppingParams params) {
  if (params.c_stop < 0) params.c_stop = 64.0 * verify_size(sys, op).c32;
  CVec b = sys.b_dense(side, root);
  CVec Tb = side == 1 ? op.apply(b) : op.adjoint().apply(b);
  double p = side == 1 ? sys.p() : sys.q();
  double qp = side == 1 ? sys.qp() : sys.pp();
  StoppingDecomposition d = run_stopping(sys.space(), sys.tree(), root, b, Tb, p, qp, params);
  d.side = side;
  return d;
}

CVec projection_pi(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                   const AccretiveSystem& sys, const CVec& f) {
  CVec out = CVec::Zero(s.size());
  for (int x : t.cube(d.root).members)
    if (d.top_of[x] < 0) out[x] = f[x];
  for (int P : d.tops) {
    cplx m = average(s, t.cube(P).members, f);
    SparseFn bp = sys.b(d.side, P);
    for (std::size_t k = 0; k < bp.idx.size(); ++k) out[bp.idx[k]] += m * bp.val[k];
  }
  return out;
}

double BufferCoefficients::total() const {
  double acc = 0.0;
  for (const auto& pr : a) acc += std::abs(pr.second);
  for (const auto& pr : top) acc += std::abs(pr.second.first) + std::abs(pr.second.second);
  return acc;
}

SparseFn buffer_function(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                         const AccretiveSystem& sys, int cube, const CVec& f, BufferCoefficients* coeffs) {
  const Cube& Q = t.cube(cube);
  const cplx c = integral(s, Q.members, f) / integral(s, Q.members, d.b);
  CVec out = CVec::Zero(s.size());
  for (int ch : Q.children) {
    const auto& M = t.cube(ch).members;
    if (d.is_top(ch)) {
      cplx a1 = average(s, M, f);
      SparseFn bp = sys.b(d.side, ch);
      for (std::size_t k = 0; k < bp.idx.size(); ++k) out[bp.idx[k]] += a1 * bp.val[k] - c * d.b[bp.idx[k]];
      if (coeffs) coeffs->top.push_back({ch, {a1, c}});
    } else {
      cplx a = integral(s, M, f) / integral(s, M, d.b) - c;
      for (int x : M) out[x] += a * d.b[x];
      if (coeffs) coeffs->a.push_back({ch, a});
    }
  }
  return restrict_to(out, Q.members);
}

SparseFn spa_part(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d, int cube, const CVec& f) {
  double thr = d.delta_stop;
  if (cube == d.root) thr = std::min(thr, std::abs(average(s, t.cube(cube).members, d.b)));
  SparseFn g = adapted_difference(s, t, d.b, cube, f, thr);
  for (std::size_t k = 0; k < g.idx.size(); ++k) g.val[k] *= d.b[g.idx[k]];
  return g;
}

Decomposition55 decomposition_55(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                                 const AccretiveSystem& sys, const CVec& f) {
  const int n = s.size();
  Decomposition55 r;
  const auto& root = t.cube(d.root).members;
  double finf = 0.0;
  for (int x : root) finf = std::max(finf, std::abs(f[x]));
  if (finf == 0.0) finf = 1.0;
  r.first = CVec::Zero(n);
  r.spa = CVec::Zero(n);
  r.buffer = CVec::Zero(n);
  r.tops = CVec::Zero(n);
  cplx m0 = average(s, root, f);
  for (int x : root) r.first[x] = m0 * d.b[x];
  for (int Q : d.omega) {
    SparseFn g = spa_part(s, t, d, Q, f);
    for (std::size_t k = 0; k < g.idx.size(); ++k) r.spa[g.idx[k]] += g.val[k];
  }
  for (int Q : d.buffer) {
    BufferCoefficients bc;
    SparseFn g = buffer_function(s, t, d, sys, Q, f, &bc);
    cplx in = 0.0;
    for (std::size_t k = 0; k < g.idx.size(); ++k) {
      r.buffer[g.idx[k]] += g.val[k];
      in += g.val[k] * s.weight(g.idx[k]);
    }
    r.coefficient_constant = std::max(r.coefficient_constant, bc.total() / finf);
    r.max_buffer_mean = std::max(r.max_buffer_mean, std::abs(in) / (t.cube(Q).mass * finf));
  }
  for (int P : d.tops) {
    cplx m = average(s, t.cube(P).members, f);
    SparseFn bp = sys.b(d.side, P);
    for (std::size_t k = 0; k < bp.idx.size(); ++k) r.tops[bp.idx[k]] += f[bp.idx[k]] - m * bp.val[k];
  }
  for (int x : root) {
    cplx sum = r.first[x] + r.spa[x] + r.buffer[x] + r.tops[x];
    r.residual = std::max(r.residual, std::abs(f[x] - sum) / finf);
  }
  return r;
}

Lemma56Report lemma_56_suite(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                             const AccretiveSystem& sys, const CVec& f, double CA) {
  Lemma56Report r;
  r.bound = 1.0 + CA;
  const int n = s.size();
  const double pe = d.side == 1 ? sys.p() : sys.q();
  const auto& root = t.cube(d.root).members;
  double finf = 0.0;
  for (int x = 0; x < n; ++x) finf = std::max(finf, std::abs(f[x]));
  if (finf == 0.0) finf = 1.0;
  CVec pf = projection_pi(s, t, d, sys, f);
  auto local = [&](const std::vector<int>& pts) {
    double acc = 0.0;
    for (int x : pts) acc += std::pow(std::abs(pf[x]), pe) * s.weight(x);
    return acc / (std::pow(finf, pe) * s.mass(pts));
  };
  r.ratio57 = local(root);
  for (std::size_t id = 0; id < t.cubes.size(); ++id) {
    if (!(d.retained(static_cast<int>(id)) || d.is_top(static_cast<int>(id)))) continue;
    const auto& M = t.cube(static_cast<int>(id)).members;
    r.ratio511 = std::max(r.ratio511, local(M));
    r.res58 = std::max(r.res58, std::abs(average(s, M, pf) - average(s, M, f)) / finf);
  }
  CVec ppf = projection_pi(s, t, d, sys, pf);
  r.res59 = (ppf - pf).cwiseAbs().maxCoeff() / finf;
  for (std::size_t id = 0; id < t.cubes.size(); ++id) {
    if (!d.retained(static_cast<int>(id))) continue;
    const auto& M = t.cube(static_cast<int>(id)).members;
    CVec fq = CVec::Zero(n), pq = CVec::Zero(n);
    for (int x : M) {
      fq[x] = f[x];
      pq[x] = pf[x];
    }
    CVec lhs = projection_pi(s, t, d, sys, fq);
    r.res510 = std::max(r.res510, (lhs - pq).cwiseAbs().maxCoeff() / finf);
  }
  return r;
}

PackingReport packing_report(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d) {
  (void)s;
  PackingReport r;
  r.root_mass = t.cube(d.root).mass;
  for (int P : d.tops) r.top_mass += t.cube(P).mass;
  for (int Q : d.buffer) r.buffer_mass += t.cube(Q).mass;
  r.eps = 1.0 - r.top_mass / r.root_mass;
  r.buffer_packing_ok = r.buffer_mass <= t.CX * r.root_mass * (1.0 + 1e-12);
  for (std::size_t id = 0; id < t.cubes.size(); ++id) {
    const int i = static_cast<int>(id);
    if (d.retained(i) && i != d.root && !(d.mean53[i] <= d.c_stop)) r.mean_bound_ok = false;
  }
  const bool root_ok = d.mean53[d.root] <= d.c_stop;
  for (int P : d.tops) {
    if (t.cube(P).parent == d.root && !root_ok) continue;
    if (!(d.mean53[P] <= d.c_stop * t.CX * (1.0 + 1e-12))) r.mean_bound_ok = false;
  }
  const auto desc = t.descendants(d.root, false);
  std::vector<int> in_root(t.cubes.size(), 0);
  for (int id : desc) in_root[id] = 1;
  for (std::size_t id = 0; id < t.cubes.size(); ++id) {
    const int i = static_cast<int>(id);
    bool inside = in_root[i] == 1;
    if (inside == (d.cls[i] == CubeClass::Outside)) r.trichotomy_ok = false;
  }
  for (int P : d.tops) {
    for (int c = t.cube(P).parent; c >= 0 && t.cube(c).gen >= t.cube(d.root).gen; c = t.cube(c).parent) {
      if (!d.retained(c)) r.maximality_ok = false;
      if (c == d.root) break;
    }
  }
  return r;
}

}  // namespace ltb
