#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ltb/accretive.hpp"
#include "ltb/haar.hpp"
#include "ltb/op.hpp"
#include "ltb/stopping.hpp"

namespace ltb {

// min over x in Q, y in R of min(lambda(x, y), lambda(y, x)), computed through a dense n x n table
class PairMeasure {
 public:
  explicit PairMeasure(const PointSpace& s);
  double operator()(const std::vector<int>& Q, const std::vector<int>& R) const;
  double at(int x, int y) const { return L_(x, y); }

 private:
  RMat L_;
};

struct CoefficientWeight {
  int Q = -1, R = -1;
  bool defined = false;
  bool near = false;      // equal lengths, rho < l
  double rho = 0.0;       // normalised set distance
  double mu_QR = 0.0;
  double alpha = 0.0;     // NaN when undefined
};

CoefficientWeight alpha_weight(const PointSpace& s, const DyadicTree& t, const PairMeasure& pm, int Q, int R,
                               double alpha_exp);

// Data attached to one side of the decomposition: wavelets on spa cubes and the fixed functions
struct BcrSide {
  const StoppingDecomposition* d = nullptr;
  int side = 1;
  HaarSystem haar;
  std::vector<std::vector<SparseFn>> theta;  // per cube: b phit^s
  std::vector<SparseFn> block;               // per retained cube: b 1_R
  std::vector<SparseFn> top_b;               // per top cube: b_P
};

class BcrContext {
 public:
  BcrContext(const AccretiveSystem& sys, const KernelOperator& op, const StoppingDecomposition& d1,
             const StoppingDecomposition& d2);

  const AccretiveSystem& system() const { return *sys_; }
  const PointSpace& space() const { return sys_->space(); }
  const DyadicTree& tree() const { return sys_->tree(); }
  const KernelOperator& op() const { return *op_; }
  const KernelOperator& adjoint() const { return adj_; }
  const BcrSide& side(int i) const { return i == 1 ? s1_ : s2_; }
  const PairMeasure& pair_measure() const;
  int root() const { return s1_.d->root; }

 private:
  const AccretiveSystem* sys_;
  const KernelOperator* op_;
  KernelOperator adj_;
  BcrSide s1_, s2_;
  mutable std::unique_ptr<PairMeasure> pm_;
};

struct EjDj {
  int first_gen = 0;
  std::vector<CVec> E;  // E[k] = E_{first_gen + k}
  std::vector<CVec> D;
  CVec pi;              // Pi f
  double residual71 = 0.0;    // max_j ||E_j f - formula_71||_inf
  double residual_pi = 0.0;   // ||E_last f - Pi f||_inf
  double mean_zero = 0.0;     // max |int_Q D_j f| / (mu(Q) ||f||_inf) over contributing cubes
};

EjDj e_and_d(const BcrContext& ctx, int side, const CVec& f);
// closed form of E_j f at generation j, through the retained and top cubes
CVec formula_71(const BcrContext& ctx, int side, const CVec& f, int gen);

enum class Term : std::uint8_t { U1, U2, U3, U4, V1, V2, V3, V4, W1, W2, W3, W4 };
const char* term_name(Term t);

struct Contribution {
  Term term;
  int left = -1;   // cube of the side-2 factor
  int right = -1;  // cube of the side-1 factor
  cplx value = 0.0;
  double raw = 0.0;  // max |<u, T v>| over the elementary functions of the pair, coefficients excluded
};

struct VSplit {
  cplx v11 = 0.0, v12 = 0.0, v13 = 0.0;
  double beta_cancellation = 0.0;  // max over Q of |sum_R beta_QR| / sum_R |beta_QR|
  int beta_cubes = 0;
};

struct BcrDecomposition {
  cplx exact = 0.0;  // <Pi^2 f, T Pi^1 g>
  cplx e0 = 0.0;
  std::array<cplx, 4> U{}, V{}, W{}, W_dual{};
  VSplit v_split, w_dual_split;
  cplx W_dense = 0.0;  // sum_j <E_j^2 f, T D_j^1 g> with dense vectors
  double scale = 0.0;  // ||f||_2 ||g||_2 ||T||_2
  double residual = 0.0;           // |exact - (e0 + U + V + W)| / scale
  double w_duality = 0.0;          // |W - W_dual| relative
  double w_dense_gap = 0.0;        // |W - W_dense| relative
  double mean_zero = 0.0;
  double residual71 = 0.0;
  std::vector<Contribution> contributions;

  cplx total() const;
  cplx sum(const std::array<cplx, 4>& a) const { return a[0] + a[1] + a[2] + a[3]; }
};

BcrDecomposition bcr_terms(const BcrContext& ctx, const CVec& f, const CVec& g);

struct AppendixBReport {
  std::array<double, 8> ratio{};  // max |coefficient| / (alpha * mu powers); NaN when no admissible pair
  std::array<int, 8> pairs{};
};

AppendixBReport appendix_b_ratios(const BcrContext& ctx, const CVec& f, const CVec& g);

struct SummingRow {
  int ref_gen = 0;
  int p = 0;
  double max_sum = 0.0;
  int refs = 0;
};

// fine sums: reference R at ref_gen, Q at ref_gen + p (lemma72 = true);
// coarse sums: reference Q at ref_gen, R at ref_gen - p (lemma72 = false)
std::vector<SummingRow> summing_lemma(const PointSpace& s, const DyadicTree& t, const PairMeasure& pm,
                                      double alpha_exp, bool lemma72, int gen_lo, int gen_hi, int pmax);

struct CompressionPoint {
  double tau = 0.0;
  cplx value = 0.0;
  double kept_fraction = 1.0;  // kept weighted pairs / weighted pairs
  int weighted = 0;
  int dropped = 0;
  double abs_error = 0.0;
  double relative_error = 0.0;  // abs_error / |exact|
  double normalized_error = 0.0;  // abs_error / (||f|| ||g|| ||T||)
  double dropped_mass = 0.0;     // sum |dropped contributions| / |exact|
};

// weight per contribution, in contribution order
std::vector<CoefficientWeight> contribution_weights(const BcrContext& ctx, const BcrDecomposition& dec);
// far pairs with alpha < tau are dropped; near and undefined pairs are always kept
CompressionPoint compressed_pairing(const BcrDecomposition& dec, const std::vector<CoefficientWeight>& w, double tau);
// decreasing thresholds from above the largest far alpha down to 0, spaced by far-alpha quantiles
std::vector<double> default_tau_grid(const std::vector<CoefficientWeight>& w, int points = 10);
std::vector<CompressionPoint> compression_sweep(const BcrDecomposition& dec, const std::vector<CoefficientWeight>& w,
                                                const std::vector<double>& taus);

}  // namespace ltb
