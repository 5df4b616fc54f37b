#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltb/dyadic.hpp"
#include "ltb/op.hpp"
#include "ltb/space.hpp"

namespace ltb {

enum class SystemKind { ConstantOne, Oscillatory, SquareWave, RadialBump, User };

std::string system_name(SystemKind k);
SystemKind parse_system(const std::string& name);

struct SystemSpec {
  SystemKind kind = SystemKind::ConstantOne;
  double amplitude = 0.0;
  double p = 2.0;
  double q = 2.0;
  std::uint64_t seed = 1;
  int frequency = 4;  // square-wave oscillations across the diameter
  CVec user1;         // User: raw profiles, renormalised per cube
  CVec user2;
};

// Per-cube pairs (b_Q^1, b_Q^2) with integral over Q equal to mu(Q).
class AccretiveSystem {
 public:
  AccretiveSystem(const PointSpace& s, const DyadicTree& t, SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  double p() const { return spec_.p; }
  double q() const { return spec_.q; }
  double pp() const { return conj_exponent(spec_.p); }
  double qp() const { return conj_exponent(spec_.q); }
  const PointSpace& space() const { return *s_; }
  const DyadicTree& tree() const { return *t_; }

  // b_Q^side restricted to Q (side is 1 or 2)
  SparseFn b(int side, int cube) const;
  // b_Q^side as a vector on X, zero off Q
  CVec b_dense(int side, int cube) const;
  // pattern used by the oscillating kinds
  const RVec& pattern(int side) const { return side == 1 ? s1_ : s2_; }

 private:
  const PointSpace* s_;
  const DyadicTree* t_;
  SystemSpec spec_;
  RVec s1_;
  RVec s2_;
};

struct SizeReport {
  double c32 = 0.0;  // max over cubes of int_Q (|b1|^p + |b2|^q) / mu(Q)
  double c33 = 0.0;  // same with int over Q-hat of |T b1|^{q'} + |T* b2|^{p'}
  double c37 = 0.0;  // same over Q
  int worst32 = -1, worst33 = -1, worst37 = -1;
  double normalization_error = 0.0;  // max |int_Q b - mu(Q)| / mu(Q)
};

SizeReport verify_size(const AccretiveSystem& sys, const KernelOperator& op);

struct DualNormConfig {
  int Q = -1, Qp = -1, Rp = -1;
  std::vector<int> Rn;
  std::vector<cplx> v;
  double value = 0.0;
};

// closed-form supremum of |sum a_n v_n| / (||sum a_n 1_{R_n}||_nu mu(R')^{1/nu'})
double dual_norm_closed_form(const std::vector<cplx>& v, const std::vector<double>& masses, double mass_Rp,
                             double nu);
// random coefficient search for the same supremum
double dual_norm_random_search(const std::vector<cplx>& v, const std::vector<double>& masses, double mass_Rp,
                               double nu, int samples, std::uint64_t seed);

DualNormConfig verify_34_config(const AccretiveSystem& sys, const KernelOperator& op, int Q, int Qp, int Rp,
                                const std::vector<int>& Rn, double nu);

// cubes R of generation k with R inside (R'-hat minus R') and inside Q, rho(R', R) < l(R)
std::vector<int> admissible_family(const PointSpace& s, const DyadicTree& t, int Q, int Rp, int k);

struct EnumerationLimits {
  int depth = 4;         // generations of Q, Q'
  int extra_levels = 3;  // generations of R below R' (and of R' below depth)
  double side_constant = -1.0;  // negative: no side condition
};

struct DualNormReport {
  double nu = 2.0;
  double constant = 0.0;
  DualNormConfig worst;
  int configs = 0;
  int skipped = 0;
};

DualNormReport verify_34(const AccretiveSystem& sys, const KernelOperator& op, double nu,
                         const EnumerationLimits& lim = {});

struct WbpReport {
  double c35 = 0.0;
  double c36 = 0.0;
  int worst35[3] = {-1, -1, -1};  // Q, Q', R
  int worst36[4] = {-1, -1, -1, -1};  // Q, Q', R, R'
  int configs35 = 0;
  int configs36 = 0;
};

WbpReport verify_wbp(const AccretiveSystem& sys, const KernelOperator& op, const EnumerationLimits& lim = {});

struct Prop33Report {
  // Tb off-cube part against its bound C28^{q'} [|b1|^p]^{q'/p}, and the dual analogue
  double max_lhs33 = 0.0;
  double max_rhs33 = 0.0;
  bool chain33_ok = true;
  // dual norm at nu = q against the Hoelder bound and the Hardy bound
  double max_lhs34 = 0.0;
  double max_holder34 = 0.0;
  double max_hardy34 = 0.0;
  bool chain34_ok = true;
  int configs = 0;
};

// requires 1/p + 1/q <= 1
Prop33Report proposition_33_check(const AccretiveSystem& sys, const KernelOperator& op,
                                  const EnumerationLimits& lim = {});

}  // namespace ltb
