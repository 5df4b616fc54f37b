#include "ltb/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace ltb {

double spectral_norm(const RMat& A) {
  if (A.size() == 0) return 0.0;
  if (A.rows() == 1 || A.cols() == 1) return A.norm();
  Eigen::BDCSVD<RMat> svd(A);
  return svd.singularValues()(0);
}

double lp_norm(const RVec& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

namespace {

RVec psi(const RVec& v, double r) {
  RVec out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = std::pow(std::max(v[i], 0.0), r - 1.0);
  return out;
}

}  // namespace

NormEstimate positive_norm(const RMat& A, double p, double q, int random_trials, std::uint64_t seed,
                           double tol, int max_iter) {
  NormEstimate est;
  if (A.size() == 0) {
    est.label = "exact";
    est.converged = true;
    return est;
  }
  if ((A.array() < 0.0).any()) throw InvalidArgument("positive_norm needs a nonnegative matrix");
  if (p == 2.0 && q == 2.0) {
    est.value = spectral_norm(A);
    est.lower_bound = est.value;
    est.converged = true;
    est.label = "exact";
    return est;
  }
  const double pp = conj_exponent(p);
  RVec x = RVec::Ones(A.cols());
  x /= lp_norm(x, p);
  double val = lp_norm(A * x, q);
  double best = val;
  int it = 0;
  for (; it < max_iter; ++it) {
    RVec y = A * x;
    RVec z = A.transpose() * psi(y, q);
    RVec xn = psi(z, pp);
    double nx = lp_norm(xn, p);
    if (!(nx > 0)) break;
    xn /= nx;
    double nv = lp_norm(A * xn, q);
    best = std::max(best, nv);
    double change = (xn - x).cwiseAbs().maxCoeff();
    x = std::move(xn);
    if (std::abs(nv - val) <= tol * std::max(nv, 1e-300) && change <= std::sqrt(tol)) {
      val = nv;
      est.converged = true;
      ++it;
      break;
    }
    val = nv;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double rnd = 0.0;
  RVec r(A.cols());
  for (int k = 0; k < random_trials; ++k) {
    for (int i = 0; i < r.size(); ++i) r[i] = u(rng);
    double nr = lp_norm(r, p);
    if (nr > 0) rnd = std::max(rnd, lp_norm(A * r, q) / nr);
  }
  est.iterations = it;
  est.lower_bound = std::max(best, rnd);
  est.value = est.lower_bound;
  est.label = "estimate (lower bound certified)";
  return est;
}

}  // namespace ltb
