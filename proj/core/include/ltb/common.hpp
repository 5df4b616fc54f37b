#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ltb {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// precondition violations on user input
struct InvalidArgument : Error {
  using Error::Error;
};

// numerically degenerate objects (singular Gram matrices, empty layers, ...)
struct Degenerate : Error {
  using Error::Error;
};

// A function supported on a finite index set, values listed in index order.
struct SparseFn {
  std::vector<int> idx;
  std::vector<cplx> val;

  std::size_t size() const { return idx.size(); }
  bool empty() const { return idx.empty(); }
};

inline CVec densify(const SparseFn& f, int n) {
  CVec out = CVec::Zero(n);
  for (std::size_t k = 0; k < f.idx.size(); ++k) out[f.idx[k]] += f.val[k];
  return out;
}

inline SparseFn restrict_to(const CVec& f, const std::vector<int>& idx) {
  SparseFn out;
  out.idx = idx;
  out.val.reserve(idx.size());
  for (int i : idx) out.val.push_back(f[i]);
  return out;
}

inline double conj_exponent(double p) {
  if (p <= 1.0) throw InvalidArgument("exponent must exceed 1");
  return p / (p - 1.0);
}

}  // namespace ltb
