#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltb/dyadic.hpp"
#include "ltb/norms.hpp"
#include "ltb/space.hpp"

namespace ltb {

enum class KernelKind { Cauchy1D, HardySize, RieszLike2D, CustomMatrix };

std::string kernel_name(KernelKind k);
KernelKind parse_kernel(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::Cauchy1D;
  double alpha = 1.0;   // Hoelder exponent used by the regularity checks
  double c_size = 1.0;  // multiplies the kernel
  RMat custom;          // kernel values for CustomMatrix
};

// Dense kernel operator Tf(x) = sum_y K(x, y) f(y) mu(y), with K(x, x) = 0.
class KernelOperator {
 public:
  KernelOperator() = default;
  KernelOperator(KernelSpec spec, RMat kernel, RVec mu);

  int size() const { return static_cast<int>(mu_.size()); }
  const KernelSpec& spec() const { return spec_; }
  double alpha() const { return spec_.alpha; }
  const RMat& kernel() const { return K_; }
  const RMat& matrix() const { return T_; }
  const RVec& mu() const { return mu_; }
  double k(int x, int y) const { return K_(x, y); }

  CVec apply(const CVec& f) const;
  CVec apply(const SparseFn& f) const;
  // <u, T v> = sum_x u(x) (Tv)(x) mu(x), bilinear
  cplx pairing(const SparseFn& u, const SparseFn& v) const;
  cplx pairing(const CVec& u, const CVec& v) const;
  // operator with kernel K(y, x)
  KernelOperator adjoint() const;
  // norm on L^2(mu)
  double l2_norm() const;

 private:
  KernelSpec spec_;
  RMat K_;
  RMat T_;
  RVec mu_;
  mutable double l2_ = -1.0;
};

KernelOperator assemble(const PointSpace& s, const KernelSpec& spec);

struct StandardEstimates {
  double size_constant = 0.0;     // max |K(x, y)| lambda(x, y)
  double holder_constant = 0.0;   // Hoelder ratio over sampled triples
  int triples = 0;
  double prop23_ratio = 0.0;      // cancellation estimate: measured / right side, max
  int prop23_samples = 0;
  int prop23_skipped = 0;
};

StandardEstimates check_standard_estimates(const PointSpace& s, const DyadicTree& t, const KernelOperator& op,
                                           int triples = 10000, std::uint64_t seed = 1, int per_cube = 2);

// right side of the mean-zero cancellation estimate, without the constant
double cz_decay_bound(const PointSpace& s, const DyadicTree& t, int cube, const SparseFn& f, double alpha);

// sum over x in gpts, y in fpts of |f(y) g(x)| mu_x mu_y / lambda(x, y)
double hardy_bilinear(const PointSpace& s, const SparseFn& f, const SparseFn& g);
// best constant of the dyadic Hardy form with f on `fpts` (L^nu) and g on `gpts` (L^nu')
NormEstimate hardy_constant(const PointSpace& s, const std::vector<int>& fpts, const std::vector<int>& gpts,
                            double nu, int random_trials = 10000, std::uint64_t seed = 1);
// ||T f||_{L^nu(target)} <= C ||f||_{L^nu(source)}, estimated through the positive majorant |K|
NormEstimate restricted_norm(const KernelOperator& op, const std::vector<int>& source,
                             const std::vector<int>& target, double nu, int random_trials = 10000,
                             std::uint64_t seed = 1);
// int over X \ (factor B) of |T f_B|^nu, divided by mu(B)
double tail_decay(const PointSpace& s, const KernelOperator& op, int center, double radius, const CVec& fB,
                  double factor, double nu);

}  // namespace ltb
