#pragma once

#include <vector>

#include "ltb/accretive.hpp"
#include "ltb/dyadic.hpp"
#include "ltb/op.hpp"
#include "ltb/space.hpp"

namespace ltb {

enum class CubeClass { Spa, Buffer, Top, Inside, Outside };

const char* class_name(CubeClass c);

struct StoppingParams {
  double delta_stop = 0.125;
  double c_stop = -1.0;  // negative: 64 times the measured size constant of b
  bool maximal_variant = false;
};

struct StoppingDecomposition {
  int root = 0;
  int side = 1;
  double delta_stop = 0.125;
  double c_stop = 0.0;
  bool maximal_variant = false;
  double p = 2.0;       // exponent on b
  double qprime = 2.0;  // exponent on Tb
  std::vector<CubeClass> cls;  // per cube id
  std::vector<int> tops;       // ascending ids
  std::vector<int> omega;      // spa cubes
  std::vector<int> buffer;     // dpa cubes with a top child
  std::vector<int> top_of;     // per point: containing top or -1
  double eps = 1.0;
  bool degenerate = false;
  double mean_bound_retained = 0.0;  // max of [|b|^p]_Q + [|Tb|^q']_Q over retained cubes below the root
  double mean_bound_tops = 0.0;      // same over tops
  CVec b;                            // b_{Q0}, zero off Q0
  std::vector<double> functional;    // stopping functional per cube, NaN where not evaluated
  std::vector<double> mean53;        // [|b|^p]_Q + [|Tb|^q']_Q per cube of the root subtree

  bool retained(int id) const { return cls[id] == CubeClass::Spa || cls[id] == CubeClass::Buffer; }
  bool is_top(int id) const { return cls[id] == CubeClass::Top; }
};

// Hardy-Littlewood maximal function of |b| over open balls centred at data points
RVec maximal_function(const PointSpace& s, const CVec& b);

StoppingDecomposition run_stopping(const PointSpace& s, const DyadicTree& t, int root, const CVec& b, const CVec& Tb,
                                   double p, double qprime, const StoppingParams& params);

// b = b_{Q0}^side, Tb = T b (side 1) or T* b (side 2), exponents (p, q') or (q, p')
StoppingDecomposition stopping_for_system(const AccretiveSystem& sys, const KernelOperator& op, int side, int root,
                                          StoppingParams params);

// Pi f = f 1_{Q0 \ union P} + sum_P [f]_P b_P
CVec projection_pi(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                   const AccretiveSystem& sys, const CVec& f);

struct BufferCoefficients {
  std::vector<std::pair<int, cplx>> a;                 // retained child, coefficient
  std::vector<std::pair<int, std::pair<cplx, cplx>>> top;  // top child, (a', a'')
  double total() const;
};

// xi_Q f for a buffer cube
SparseFn buffer_function(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                         const AccretiveSystem& sys, int cube, const CVec& f, BufferCoefficients* coeffs = nullptr);
// b Delta_Q^b f for a cube of Omega
SparseFn spa_part(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d, int cube, const CVec& f);

struct Decomposition55 {
  CVec first, spa, buffer, tops;
  double residual = 0.0;        // max pointwise |f - sum| / ||f||_inf on Q0
  double coefficient_constant = 0.0;  // max over buffer cubes of sum |a| + |a'| + |a''| over ||f||_inf
  double max_buffer_mean = 0.0; // max |int xi_Q f| / (mu(Q) ||f||_inf)
};

Decomposition55 decomposition_55(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                                 const AccretiveSystem& sys, const CVec& f);

struct Lemma56Report {
  double ratio57 = 0.0;   // int_{Q0} |Pi f|^r / (||f||_inf^r mu(Q0))
  double ratio511 = 0.0;  // max over retained cubes and tops of the cube-local analogue
  double bound = 0.0;     // 1 + C_A
  double res58 = 0.0;     // max |[Pi f]_Q - [f]_Q| / ||f||_inf
  double res59 = 0.0;     // ||Pi Pi f - Pi f||_inf / ||f||_inf
  double res510 = 0.0;    // max_Q ||Pi(f 1_Q) - (Pi f) 1_Q||_inf / ||f||_inf
};

Lemma56Report lemma_56_suite(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d,
                             const AccretiveSystem& sys, const CVec& f, double CA);

struct PackingReport {
  double eps = 1.0;
  double top_mass = 0.0;
  double buffer_mass = 0.0;
  double root_mass = 0.0;
  bool buffer_packing_ok = true;  // sum over buffer <= C_X mu(Q0)
  bool mean_bound_ok = true;      // mean bound with C_stop on retained, C_stop C_X on tops
  bool trichotomy_ok = true;
  bool maximality_ok = true;
};

PackingReport packing_report(const PointSpace& s, const DyadicTree& t, const StoppingDecomposition& d);

}  // namespace ltb
