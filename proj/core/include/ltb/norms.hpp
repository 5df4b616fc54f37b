#pragma once

#include <cstdint>
#include <string>

#include "ltb/common.hpp"

namespace ltb {

struct NormEstimate {
  double value = 0.0;        // reported estimate
  double lower_bound = 0.0;  // best certified lower bound (random or iterate)
  int iterations = 0;
  bool converged = false;
  std::string label;         // "exact" or "estimate (lower bound certified)"
};

// largest singular value
double spectral_norm(const RMat& A);

// ||A||_{p -> q} for an entrywise nonnegative matrix acting on unweighted sequences.
// p == q == 2 uses the SVD; otherwise Boyd's nonlinear power iteration plus random positive
// lower bounds.
NormEstimate positive_norm(const RMat& A, double p, double q, int random_trials = 10000,
                           std::uint64_t seed = 1, double tol = 1e-6, int max_iter = 10000);

double lp_norm(const RVec& v, double p);

}  // namespace ltb
