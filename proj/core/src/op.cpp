#include "ltb/op.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ltb {

std::string kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::Cauchy1D: return "cauchy-1d";
    case KernelKind::HardySize: return "hardy-size";
    case KernelKind::RieszLike2D: return "riesz-like-2d";
    case KernelKind::CustomMatrix: return "custom-matrix";
  }
  return "unknown";
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "cauchy-1d") return KernelKind::Cauchy1D;
  if (name == "hardy-size") return KernelKind::HardySize;
  if (name == "riesz-like-2d") return KernelKind::RieszLike2D;
  if (name == "custom-matrix") return KernelKind::CustomMatrix;
  throw InvalidArgument("unknown kernel: " + name);
}

KernelOperator::KernelOperator(KernelSpec spec, RMat kernel, RVec mu)
    : spec_(std::move(spec)), K_(std::move(kernel)), mu_(std::move(mu)) {
  if (spec_.kind != KernelKind::CustomMatrix) K_.diagonal().setZero();
  T_ = K_ * mu_.asDiagonal();
}

CVec KernelOperator::apply(const CVec& f) const {
  CVec out(f.size());
  out.real() = T_ * f.real();
  out.imag() = T_ * f.imag();
  return out;
}

CVec KernelOperator::apply(const SparseFn& f) const {
  const int n = size();
  RVec re = RVec::Zero(n), im = RVec::Zero(n);
  for (std::size_t k = 0; k < f.idx.size(); ++k) {
    const int y = f.idx[k];
    re += T_.col(y) * f.val[k].real();
    im += T_.col(y) * f.val[k].imag();
  }
  CVec out(n);
  out.real() = re;
  out.imag() = im;
  return out;
}

cplx KernelOperator::pairing(const SparseFn& u, const SparseFn& v) const {
  cplx acc = 0.0;
  for (std::size_t a = 0; a < u.idx.size(); ++a) {
    const int x = u.idx[a];
    cplx inner = 0.0;
    for (std::size_t b = 0; b < v.idx.size(); ++b) inner += T_(x, v.idx[b]) * v.val[b];
    acc += u.val[a] * mu_[x] * inner;
  }
  return acc;
}

cplx KernelOperator::pairing(const CVec& u, const CVec& v) const {
  CVec tv = apply(v);
  cplx acc = 0.0;
  for (int x = 0; x < size(); ++x) acc += u[x] * tv[x] * mu_[x];
  return acc;
}

KernelOperator KernelOperator::adjoint() const {
  return KernelOperator(spec_, K_.transpose(), mu_);
}

double KernelOperator::l2_norm() const {
  if (l2_ < 0) {
    RVec s = mu_.cwiseSqrt();
    RMat S = s.asDiagonal() * K_ * s.asDiagonal();
    l2_ = spectral_norm(S);
  }
  return l2_;
}

KernelOperator assemble(const PointSpace& s, const KernelSpec& spec) {
  const int n = s.size();
  RMat K = RMat::Zero(n, n);
  switch (spec.kind) {
    case KernelKind::Cauchy1D:
      if (s.dim() != 1) throw InvalidArgument("cauchy-1d needs a one dimensional embedding");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          double d = s.coords()(i, 0) - s.coords()(j, 0);
          if (d == 0.0) throw InvalidArgument("cauchy-1d kernel singular at distinct points");
          K(i, j) = 1.0 / d;
        }
      break;
    case KernelKind::HardySize:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) K(i, j) = 1.0 / s.lambda(i, j);
      break;
    case KernelKind::RieszLike2D:
      if (s.dim() != 2) throw InvalidArgument("riesz-like-2d needs a two dimensional embedding");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          double dx = s.coords()(i, 0) - s.coords()(j, 0);
          double dy = s.coords()(i, 1) - s.coords()(j, 1);
          double r = std::hypot(dx, dy);
          if (r == 0.0) throw InvalidArgument("riesz-like-2d kernel singular at distinct points");
          K(i, j) = dx / (r * r * r);
        }
      break;
    case KernelKind::CustomMatrix:
      if (spec.custom.rows() != n || spec.custom.cols() != n) throw InvalidArgument("custom kernel shape mismatch");
      K = spec.custom;
      break;
  }
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw InvalidArgument("Hoelder exponent must lie in (0, 1]");
  K *= spec.c_size;
  return KernelOperator(spec, K, s.mu());
}

double cz_decay_bound(const PointSpace& s, const DyadicTree& t, int cube, const SparseFn& f, double alpha) {
  const Cube& Q = t.cube(cube);
  const double l = t.raw_length(cube);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.idx.size(); ++k) {
    const int y = f.idx[k];
    double r = s.rho(Q.center, y);
    acc += std::pow(l / r, alpha) / s.lambda(Q.center, y) * std::abs(f.val[k]) * s.weight(y);
  }
  return acc;
}

StandardEstimates check_standard_estimates(const PointSpace& s, const DyadicTree& t, const KernelOperator& op,
                                           int triples, std::uint64_t seed, int per_cube) {
  StandardEstimates rep;
  const int n = s.size();
  const RMat& K = op.kernel();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) rep.size_constant = std::max(rep.size_constant, std::abs(K(x, y)) * s.lambda(x, y));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int attempts = 0;
  while (rep.triples < triples && attempts < 50 * triples && n > 2) {
    ++attempts;
    int x = pick(rng);
    int y = pick(rng);
    if (x == y) continue;
    const double rxy = s.rho(x, y);
    int cnt = s.ball_count(x, std::nextafter(0.5 * rxy, 1e300));
    if (cnt < 2) continue;
    std::uniform_int_distribution<int> pk(1, cnt - 1);
    int xp = s.order(x)[pk(rng)];
    double rxx = s.rho(x, xp);
    double num = std::abs(K(x, y) - K(xp, y)) + std::abs(K(y, x) - K(y, xp));
    double ratio = num * s.lambda(x, y) / std::pow(rxx / rxy, op.alpha());
    rep.holder_constant = std::max(rep.holder_constant, ratio);
    ++rep.triples;
  }

  std::normal_distribution<double> g(0.0, 1.0);
  for (const Cube& Q : t.cubes) {
    if (Q.members.size() < 2) continue;
    std::vector<int> hat = t.hat(Q.id);
    std::vector<int> off;
    for (int y = 0, k = 0; y < n; ++y) {
      if (k < static_cast<int>(hat.size()) && hat[k] == y) {
        ++k;
      } else {
        off.push_back(y);
      }
    }
    if (off.empty()) {
      ++rep.prop23_skipped;
      continue;
    }
    for (int trial = 0; trial < per_cube; ++trial) {
      SparseFn gq, f;
      gq.idx = Q.members;
      cplx mean = 0.0;
      for (int x : Q.members) {
        gq.val.push_back(cplx(g(rng), 0.0));
        mean += gq.val.back() * s.weight(x);
      }
      mean /= Q.mass;
      double l1 = 0.0;
      for (std::size_t k = 0; k < gq.idx.size(); ++k) {
        gq.val[k] -= mean;
        l1 += std::abs(gq.val[k]) * s.weight(gq.idx[k]);
      }
      f.idx = off;
      for (std::size_t k = 0; k < off.size(); ++k) f.val.push_back(cplx(g(rng), 0.0));
      double rhs = l1 * cz_decay_bound(s, t, Q.id, f, op.alpha());
      if (rhs <= 0) continue;
      rep.prop23_ratio = std::max(rep.prop23_ratio, std::abs(op.pairing(gq, f)) / rhs);
      ++rep.prop23_samples;
    }
  }
  return rep;
}

double hardy_bilinear(const PointSpace& s, const SparseFn& f, const SparseFn& g) {
  double acc = 0.0;
  for (std::size_t a = 0; a < g.idx.size(); ++a) {
    const int x = g.idx[a];
    double inner = 0.0;
    for (std::size_t b = 0; b < f.idx.size(); ++b) {
      const int y = f.idx[b];
      if (x == y) throw InvalidArgument("hardy_bilinear needs disjoint supports");
      inner += std::abs(f.val[b]) * s.weight(y) / s.lambda(x, y);
    }
    acc += std::abs(g.val[a]) * s.weight(x) * inner;
  }
  return acc;
}

NormEstimate hardy_constant(const PointSpace& s, const std::vector<int>& fpts, const std::vector<int>& gpts,
                            double nu, int random_trials, std::uint64_t seed) {
  const double nup = conj_exponent(nu);
  RMat M(gpts.size(), fpts.size());
  for (std::size_t a = 0; a < gpts.size(); ++a) {
    const int x = gpts[a];
    for (std::size_t b = 0; b < fpts.size(); ++b) {
      const int y = fpts[b];
      if (x == y) throw InvalidArgument("hardy_constant needs disjoint regions");
      M(a, b) = std::pow(s.weight(x), 1.0 / nu) * std::pow(s.weight(y), 1.0 / nup) / s.lambda(x, y);
    }
  }
  return positive_norm(M, nu, nu, random_trials, seed);
}

NormEstimate restricted_norm(const KernelOperator& op, const std::vector<int>& source,
                             const std::vector<int>& target, double nu, int random_trials, std::uint64_t seed) {
  const double nup = conj_exponent(nu);
  const RVec& mu = op.mu();
  RMat A(target.size(), source.size());
  for (std::size_t a = 0; a < target.size(); ++a)
    for (std::size_t b = 0; b < source.size(); ++b)
      A(a, b) = std::pow(mu[target[a]], 1.0 / nu) * op.k(target[a], source[b]) * std::pow(mu[source[b]], 1.0 / nup);
  if (nu == 2.0) {
    NormEstimate e;
    e.value = spectral_norm(A);
    e.lower_bound = e.value;
    e.converged = true;
    e.label = "exact";
    return e;
  }
  RMat P = A.cwiseAbs();
  NormEstimate e = positive_norm(P, nu, nu, random_trials, seed);
  if ((A.array() < 0.0).any()) e.label = "estimate (positive majorant)";
  return e;
}

double tail_decay(const PointSpace& s, const KernelOperator& op, int center, double radius, const CVec& fB,
                  double factor, double nu) {
  if (!(factor > 1.0)) throw InvalidArgument("dilation factor must exceed 1");
  const int n = s.size();
  std::vector<int> ext;
  for (int x = 0; x < n; ++x)
    if (s.rho(center, x) >= factor * radius) ext.push_back(x);
  if (ext.empty()) throw InvalidArgument("dilated ball covers the space");
  std::vector<int> inside = s.ball(center, radius);
  SparseFn f = restrict_to(fB, inside);
  CVec tf = op.apply(f);
  double acc = 0.0;
  for (int x : ext) acc += std::pow(std::abs(tf[x]), nu) * s.weight(x);
  return acc / s.ball_mass(center, radius);
}

}  // namespace ltb
