#include "ltb/accretive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ltb/haar.hpp"

namespace ltb {

std::string system_name(SystemKind k) {
  switch (k) {
    case SystemKind::ConstantOne: return "constant-one";
    case SystemKind::Oscillatory: return "oscillatory";
    case SystemKind::SquareWave: return "square-wave";
    case SystemKind::RadialBump: return "radial-bump";
    case SystemKind::User: return "user";
  }
  return "unknown";
}

SystemKind parse_system(const std::string& name) {
  if (name == "constant-one") return SystemKind::ConstantOne;
  if (name == "oscillatory") return SystemKind::Oscillatory;
  if (name == "square-wave") return SystemKind::SquareWave;
  if (name == "radial-bump") return SystemKind::RadialBump;
  if (name == "user") return SystemKind::User;
  throw InvalidArgument("unknown accretive system: " + name);
}

namespace {

RVec balanced_signs(int n, std::uint64_t seed) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i < n / 2 ? 1.0 : -1.0;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> d(0, i);
    std::swap(v[i], v[d(rng)]);
  }
  RVec out(n);
  for (int i = 0; i < n; ++i) out[i] = v[i];
  return out;
}

RVec square_wave(const PointSpace& s, int freq, double phase) {
  const int n = s.size();
  RVec out(n);
  const double diam = s.diameter() > 0 ? s.diameter() : 1.0;
  for (int i = 0; i < n; ++i) {
    double x = s.rho(0, i) / diam;
    double v = std::sin(2.0 * M_PI * (freq * x + phase));
    out[i] = v >= 0 ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace

AccretiveSystem::AccretiveSystem(const PointSpace& s, const DyadicTree& t, SystemSpec spec)
    : s_(&s), t_(&t), spec_(std::move(spec)) {
  if (!(spec_.p > 1.0) || !(spec_.q > 1.0) || !std::isfinite(spec_.p) || !std::isfinite(spec_.q))
    throw InvalidArgument("exponents p, q must lie in (1, inf)");
  const int n = s.size();
  switch (spec_.kind) {
    case SystemKind::Oscillatory:
      s1_ = balanced_signs(n, spec_.seed);
      s2_ = balanced_signs(n, spec_.seed + 0x9e3779b97f4a7c15ULL);
      break;
    case SystemKind::SquareWave:
      s1_ = square_wave(s, spec_.frequency, 0.0);
      s2_ = square_wave(s, spec_.frequency, 0.0);
      break;
    case SystemKind::User:
      if (spec_.user1.size() != n || spec_.user2.size() != n) throw InvalidArgument("user profiles must have n entries");
      break;
    default:
      break;
  }
}

SparseFn AccretiveSystem::b(int side, int cube) const {
  if (side != 1 && side != 2) throw InvalidArgument("side must be 1 or 2");
  const Cube& Q = t_->cube(cube);
  SparseFn out;
  out.idx = Q.members;
  out.val.resize(Q.members.size());
  const double a = spec_.amplitude;
  switch (spec_.kind) {
    case SystemKind::ConstantOne:
      std::fill(out.val.begin(), out.val.end(), cplx(1.0, 0.0));
      break;
    case SystemKind::Oscillatory:
    case SystemKind::SquareWave: {
      const RVec& pat = side == 1 ? s1_ : s2_;
      double mean = 0.0;
      for (int x : Q.members) mean += pat[x] * s_->weight(x);
      mean /= Q.mass;
      for (std::size_t k = 0; k < Q.members.size(); ++k) out.val[k] = 1.0 + a * (pat[Q.members[k]] - mean);
      break;
    }
    case SystemKind::RadialBump: {
      const double l = t_->raw_length(cube);
      std::vector<double> psi(Q.members.size());
      double mean = 0.0;
      for (std::size_t k = 0; k < Q.members.size(); ++k) {
        psi[k] = std::max(0.0, 1.0 - s_->rho(Q.members[k], Q.center) / l);
        mean += psi[k] * s_->weight(Q.members[k]);
      }
      mean /= Q.mass;
      for (std::size_t k = 0; k < Q.members.size(); ++k) out.val[k] = 1.0 + a * (psi[k] - mean);
      break;
    }
    case SystemKind::User: {
      const CVec& u = side == 1 ? spec_.user1 : spec_.user2;
      cplx in = 0.0;
      for (int x : Q.members) in += u[x] * s_->weight(x);
      if (std::abs(in) < 1e-14 * Q.mass) throw Degenerate("user profile has vanishing integral on a cube");
      cplx scale = Q.mass / in;
      for (std::size_t k = 0; k < Q.members.size(); ++k) out.val[k] = u[Q.members[k]] * scale;
      break;
    }
  }
  return out;
}

CVec AccretiveSystem::b_dense(int side, int cube) const { return densify(b(side, cube), s_->size()); }

SizeReport verify_size(const AccretiveSystem& sys, const KernelOperator& op) {
  const PointSpace& s = sys.space();
  const DyadicTree& t = sys.tree();
  KernelOperator adj = op.adjoint();
  SizeReport rep;
  const double p = sys.p(), q = sys.q(), pp = sys.pp(), qp = sys.qp();
  for (const Cube& Q : t.cubes) {
    SparseFn b1 = sys.b(1, Q.id), b2 = sys.b(2, Q.id);
    double i32 = 0.0;
    cplx int1 = 0.0, int2 = 0.0;
    for (std::size_t k = 0; k < b1.idx.size(); ++k) {
      const double w = s.weight(b1.idx[k]);
      i32 += (std::pow(std::abs(b1.val[k]), p) + std::pow(std::abs(b2.val[k]), q)) * w;
      int1 += b1.val[k] * w;
      int2 += b2.val[k] * w;
    }
    rep.normalization_error = std::max(rep.normalization_error,
                                       std::max(std::abs(int1 - Q.mass), std::abs(int2 - Q.mass)) / Q.mass);
    CVec t1 = op.apply(b1), t2 = adj.apply(b2);
    double i33 = 0.0, i37 = 0.0;
    for (int x : t.hat(Q.id)) {
      double v = (std::pow(std::abs(t1[x]), qp) + std::pow(std::abs(t2[x]), pp)) * s.weight(x);
      i33 += v;
      if (std::binary_search(Q.members.begin(), Q.members.end(), x)) i37 += v;
    }
    auto upd = [&](double v, double& best, int& who) {
      if (v > best) {
        best = v;
        who = Q.id;
      }
    };
    upd(i32 / Q.mass, rep.c32, rep.worst32);
    upd(i33 / Q.mass, rep.c33, rep.worst33);
    upd(i37 / Q.mass, rep.c37, rep.worst37);
  }
  return rep;
}

double dual_norm_closed_form(const std::vector<cplx>& v, const std::vector<double>& masses, double mass_Rp,
                             double nu) {
  const double nup = conj_exponent(nu);
  double acc = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) acc += std::pow(std::abs(v[n]), nup) * std::pow(masses[n], -nup / nu);
  return std::pow(acc, 1.0 / nup) / std::pow(mass_Rp, 1.0 / nup);
}

double dual_norm_random_search(const std::vector<cplx>& v, const std::vector<double>& masses, double mass_Rp,
                               double nu, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  bool real = std::all_of(v.begin(), v.end(), [](const cplx& z) { return z.imag() == 0.0; });
  double best = 0.0;
  const double scale = std::pow(mass_Rp, 1.0 - 1.0 / nu);
  std::vector<cplx> a(v.size());
  for (int k = 0; k < samples; ++k) {
    double norm = 0.0;
    cplx dot = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
      a[n] = real ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
      norm += std::pow(std::abs(a[n]), nu) * masses[n];
      dot += a[n] * v[n];
    }
    norm = std::pow(norm, 1.0 / nu);
    if (norm > 0) best = std::max(best, std::abs(dot) / (norm * scale));
  }
  return best;
}

std::vector<int> admissible_family(const PointSpace& s, const DyadicTree& t, int Q, int Rp, int k) {
  std::vector<int> out;
  const Cube& R1 = t.cube(Rp);
  if (k < R1.gen || k > t.depth()) return out;
  std::vector<int> ring;
  for (int nb : R1.neighbors) ring.insert(ring.end(), t.cube(nb).members.begin(), t.cube(nb).members.end());
  std::sort(ring.begin(), ring.end());
  for (int id : t.generations[k]) {
    const Cube& R = t.cube(id);
    if (!t.contains(Q, id)) continue;
    bool inside = std::all_of(R.members.begin(), R.members.end(),
                              [&](int x) { return std::binary_search(ring.begin(), ring.end(), x); });
    if (!inside) continue;
    if (set_distance(s, R1.members, R.members) < t.raw_length(id)) out.push_back(id);
  }
  return out;
}

DualNormConfig verify_34_config(const AccretiveSystem& sys, const KernelOperator& op, int Q, int Qp, int Rp,
                                const std::vector<int>& Rn, double nu) {
  const PointSpace& s = sys.space();
  const DyadicTree& t = sys.tree();
  DualNormConfig c;
  c.Q = Q;
  c.Qp = Qp;
  c.Rp = Rp;
  c.Rn = Rn;
  CVec b1 = sys.b_dense(1, Qp);
  CVec b2 = sys.b_dense(2, Q);
  SparseFn h = restrict_to(b1, t.cube(Rp).members);
  CVec th = op.apply(h);
  std::vector<double> masses;
  for (int id : Rn) {
    cplx acc = 0.0;
    for (int x : t.cube(id).members) acc += b2[x] * th[x] * s.weight(x);
    c.v.push_back(acc);
    masses.push_back(t.cube(id).mass);
  }
  c.value = c.v.empty() ? 0.0 : dual_norm_closed_form(c.v, masses, t.cube(Rp).mass, nu);
  return c;
}

namespace {

std::vector<int> ancestors_up_to(const DyadicTree& t, int id, int depth) {
  std::vector<int> out;
  for (int c = id; c >= 0; c = t.cube(c).parent)
    if (t.cube(c).gen <= depth) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

bool side_ok(const AccretiveSystem& sys, int side, int owner, int cube, double exponent, double C) {
  if (C < 0) return true;
  const DyadicTree& t = sys.tree();
  CVec b = sys.b_dense(side, owner);
  return average_abs_pow(sys.space(), t.cube(cube).members, b, exponent) <= C;
}

}  // namespace

DualNormReport verify_34(const AccretiveSystem& sys, const KernelOperator& op, double nu,
                         const EnumerationLimits& lim) {
  const PointSpace& s = sys.space();
  const DyadicTree& t = sys.tree();
  DualNormReport rep;
  rep.nu = nu;
  const int depth = std::min(lim.depth, t.depth());
  const int rdepth = std::min(lim.depth + lim.extra_levels, t.depth());
  std::vector<int> top;
  for (int g = 0; g <= depth; ++g)
    for (int id : t.generations[g]) top.push_back(id);
  for (int g = 0; g <= rdepth; ++g) {
    for (int Rp : t.generations[g]) {
      for (int Qp : ancestors_up_to(t, Rp, depth)) {
        if (!side_ok(sys, 1, Qp, Rp, sys.p(), lim.side_constant)) {
          ++rep.skipped;
          continue;
        }
        for (int Q : top) {
          for (int k = g; k <= std::min(g + lim.extra_levels, t.depth()); ++k) {
            std::vector<int> fam = admissible_family(s, t, Q, Rp, k);
            std::vector<int> kept;
            for (int R : fam) {
              if (side_ok(sys, 2, Q, R, sys.q(), lim.side_constant)) {
                kept.push_back(R);
              } else {
                ++rep.skipped;
              }
            }
            if (kept.empty()) continue;
            DualNormConfig c = verify_34_config(sys, op, Q, Qp, Rp, kept, nu);
            ++rep.configs;
            if (rep.worst.Q < 0 || c.value > rep.constant) {
              rep.constant = c.value;
              rep.worst = c;
            }
          }
        }
      }
    }
  }
  return rep;
}

WbpReport verify_wbp(const AccretiveSystem& sys, const KernelOperator& op, const EnumerationLimits& lim) {
  const DyadicTree& t = sys.tree();
  WbpReport rep;
  const int depth = std::min(lim.depth, t.depth());
  for (const Cube& R : t.cubes) {
    auto anc = ancestors_up_to(t, R.id, depth);
    for (int Q : anc) {
      if (!side_ok(sys, 2, Q, R.id, sys.q(), lim.side_constant)) continue;
      SparseFn u = restrict_to(sys.b_dense(2, Q), R.members);
      for (int Qp : anc) {
        if (!side_ok(sys, 1, Qp, R.id, sys.p(), lim.side_constant)) continue;
        SparseFn v = restrict_to(sys.b_dense(1, Qp), R.members);
        double val = std::abs(op.pairing(u, v)) / R.mass;
        ++rep.configs35;
        if (rep.worst35[0] < 0 || val > rep.c35) {
          rep.c35 = val;
          rep.worst35[0] = Q;
          rep.worst35[1] = Qp;
          rep.worst35[2] = R.id;
        }
      }
    }
    for (int Rp : R.neighbors) {
      auto ancp = ancestors_up_to(t, Rp, depth);
      for (int Q : anc) {
        SparseFn u = restrict_to(sys.b_dense(2, Q), R.members);
        for (int Qp : ancp) {
          SparseFn v = restrict_to(sys.b_dense(1, Qp), t.cube(Rp).members);
          double val = std::abs(op.pairing(u, v)) / t.cube(Rp).mass;
          ++rep.configs36;
          if (rep.worst36[0] < 0 || val > rep.c36) {
            rep.c36 = val;
            rep.worst36[0] = Q;
            rep.worst36[1] = Qp;
            rep.worst36[2] = R.id;
            rep.worst36[3] = Rp;
          }
        }
      }
    }
  }
  return rep;
}

Prop33Report proposition_33_check(const AccretiveSystem& sys, const KernelOperator& op, const EnumerationLimits& lim) {
  const double p = sys.p(), q = sys.q(), pp = sys.pp(), qp = sys.qp();
  if (1.0 / p + 1.0 / q > 1.0 + 1e-12) throw InvalidArgument("the Tb size chain needs 1/p + 1/q <= 1");
  const PointSpace& s = sys.space();
  const DyadicTree& t = sys.tree();
  KernelOperator adj = op.adjoint();
  Prop33Report rep;
  const double slack = 1.0 + 1e-9;
  const int depth = std::min(lim.depth + lim.extra_levels, t.depth());
  for (int g = 0; g <= depth; ++g) {
    for (int id : t.generations[g]) {
      const Cube& Q = t.cube(id);
      std::vector<int> hat = t.hat(id), ring;
      std::set_difference(hat.begin(), hat.end(), Q.members.begin(), Q.members.end(), std::back_inserter(ring));
      if (ring.empty()) continue;
      CVec b1 = sys.b_dense(1, id), b2 = sys.b_dense(2, id);
      CVec t1 = op.apply(restrict_to(b1, Q.members)), t2 = adj.apply(restrict_to(b2, Q.members));
      double lhs = 0.0;
      for (int x : ring) lhs += (std::pow(std::abs(t1[x]), qp) + std::pow(std::abs(t2[x]), pp)) * s.weight(x);
      lhs /= Q.mass;
      double c1 = restricted_norm(op, Q.members, ring, qp, 200).value;
      double c2 = restricted_norm(adj, Q.members, ring, pp, 200).value;
      double rhs = std::pow(c1, qp) * std::pow(average_abs_pow(s, Q.members, b1, p), qp / p) +
                   std::pow(c2, pp) * std::pow(average_abs_pow(s, Q.members, b2, q), pp / q);
      rep.max_lhs33 = std::max(rep.max_lhs33, lhs);
      rep.max_rhs33 = std::max(rep.max_rhs33, rhs);
      if (lhs > rhs * slack + 1e-300) rep.chain33_ok = false;
    }
  }
  const int rdepth = std::min(lim.depth + lim.extra_levels, t.depth());
  const int qdepth = std::min(lim.depth, t.depth());
  std::vector<int> top;
  for (int g = 0; g <= qdepth; ++g)
    for (int id : t.generations[g]) top.push_back(id);
  for (int g = 0; g <= rdepth; ++g) {
    for (int Rp : t.generations[g]) {
      const Cube& R1 = t.cube(Rp);
      std::vector<int> hat = t.hat(Rp), ring;
      std::set_difference(hat.begin(), hat.end(), R1.members.begin(), R1.members.end(), std::back_inserter(ring));
      if (ring.empty()) continue;
      for (int Qp : ancestors_up_to(t, Rp, qdepth)) {
        CVec b1 = sys.b_dense(1, Qp);
        SparseFn h = restrict_to(b1, R1.members);
        CVec th = op.apply(h);
        double Cp = average_abs_pow(s, R1.members, b1, p);
        double c28 = restricted_norm(op, R1.members, ring, qp, 200).value;
        for (int Q : top) {
          for (int k = g; k <= std::min(g + lim.extra_levels, t.depth()); ++k) {
            std::vector<int> fam = admissible_family(s, t, Q, Rp, k);
            if (fam.empty()) continue;
            DualNormConfig c = verify_34_config(sys, op, Q, Qp, Rp, fam, q);
            CVec b2 = sys.b_dense(2, Q);
            double Cq = 0.0, tail = 0.0;
            for (int R : fam) {
              Cq = std::max(Cq, average_abs_pow(s, t.cube(R).members, b2, q));
              for (int x : t.cube(R).members) tail += std::pow(std::abs(th[x]), qp) * s.weight(x);
            }
            double holder = std::pow(Cq, 1.0 / q) * std::pow(tail, 1.0 / qp) / std::pow(R1.mass, 1.0 / qp);
            double hardy = std::pow(Cq, 1.0 / q) * std::pow(Cp, 1.0 / p) * c28;
            rep.max_lhs34 = std::max(rep.max_lhs34, c.value);
            rep.max_holder34 = std::max(rep.max_holder34, holder);
            rep.max_hardy34 = std::max(rep.max_hardy34, hardy);
            if (c.value > holder * slack + 1e-14) rep.chain34_ok = false;
            if (qp == 2.0 && holder > hardy * slack + 1e-14) rep.chain34_ok = false;
            ++rep.configs;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace ltb
