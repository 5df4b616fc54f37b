#pragma once

#include <cstdint>
#include <vector>

#include "ltb/dyadic.hpp"
#include "ltb/space.hpp"

namespace ltb {

cplx average(const PointSpace& s, const std::vector<int>& pts, const CVec& f);
double average_abs_pow(const PointSpace& s, const std::vector<int>& pts, const CVec& f, double p);
cplx integral(const PointSpace& s, const std::vector<int>& pts, const CVec& f);

// |[b]_Q| and every |[b]_Q'| over children at least `threshold`
bool is_spa(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, double threshold);

// Adapted Haar wavelets of one cube. Rows are wavelets, columns are children.
struct WaveletEntry {
  int cube = -1;
  std::vector<int> children;
  std::vector<double> child_mass;
  std::vector<cplx> child_bmean;
  cplx bmean = 1.0;
  RMat w;     // orthonormal basis of mean-zero child-constant functions
  CMat phi;   // analysis functions
  CMat phit;  // synthesis functions, projections of w onto the b-mean-zero space
  cplx cQ = 1.0;
  double accretivity = 1.0;
  double frame_lower = 1.0;
  double frame_upper = 1.0;
  double norm_bound = 0.0;  // max_s ||phi^s||_2 + ||phit^s||_2
  double condition = 1.0;

  int count() const { return static_cast<int>(phi.rows()); }
};

WaveletEntry build_adapted_haar(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube,
                                double threshold = 0.125);

// <f, phi^s> for every s
std::vector<cplx> analysis(const PointSpace& s, const DyadicTree& t, const WaveletEntry& e, const CVec& f);
// child-constant function given by per-child values, optionally multiplied by b, supported on the cube
SparseFn expand(const DyadicTree& t, const WaveletEntry& e, const Eigen::RowVectorXcd& child_values,
                const CVec* b = nullptr);
// sum_s a_s phit^s (times b when given)
SparseFn synthesis(const DyadicTree& t, const WaveletEntry& e, const std::vector<cplx>& a, const CVec* b = nullptr);

SparseFn classical_expectation(const PointSpace& s, const DyadicTree& t, int cube, const CVec& f);
SparseFn classical_difference(const PointSpace& s, const DyadicTree& t, int cube, const CVec& f);
SparseFn adapted_expectation(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, const CVec& f);
SparseFn adapted_difference(const PointSpace& s, const DyadicTree& t, const CVec& b, int cube, const CVec& f,
                            double threshold = 0.125);

struct ParsevalReport {
  double energy = 0.0;      // ||f - [f]_X||^2
  double difference_sum = 0.0;
  double reconstruction_residual = 0.0;  // max |f - [f]_X - sum Delta_Q f|
};
ParsevalReport classical_parseval(const PointSpace& s, const DyadicTree& t, const CVec& f);

struct HaarSystem {
  std::vector<int> slot;  // cube id -> entry index or -1
  std::vector<WaveletEntry> entries;
  const WaveletEntry* find(int cube) const {
    return slot[cube] < 0 ? nullptr : &entries[slot[cube]];
  }
};

// wavelets on the listed cubes that have at least two children
HaarSystem build_haar_system(const PointSpace& s, const DyadicTree& t, const CVec& b, const std::vector<int>& cubes,
                             double threshold = 0.125);

double carleson_ratio(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys, const CVec& f);

// Lf = sum_Q c_Q sum_s <f, phi^s> phit^s over the system cubes; with b, the synthesis is multiplied by b
CVec apply_L(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys, const std::vector<cplx>& c,
             const CVec& f, const CVec* b = nullptr);

struct LNormReport {
  double nu = 2.0;
  double norm = 0.0;
  int trials = 0;
};
LNormReport empirical_L_norm(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys,
                             const std::vector<cplx>& c, double nu, int trials, std::uint64_t seed,
                             const CVec* b = nullptr);

// sup over neighbour pairs Q != R and random f on Q, g on R of
// |<Lf, g>| / (mu(Q)^{1 - 1/p - 1/q} ||f||_p ||g||_q)
double neighbor_pair_constant(const PointSpace& s, const DyadicTree& t, const HaarSystem& sys,
                              const std::vector<cplx>& c, double p, double q, int trials, std::uint64_t seed);

}  // namespace ltb
