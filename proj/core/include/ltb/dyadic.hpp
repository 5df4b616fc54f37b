#pragma once

#include <string>
#include <vector>

#include "ltb/space.hpp"

namespace ltb {

struct Cube {
  int id = -1;
  int gen = 0;
  int center = -1;
  int parent = -1;
  std::vector<int> members;    // ascending
  std::vector<int> children;   // ordered by center index
  std::vector<int> neighbors;  // same generation, rho(Q, Q') < l(Q), self excluded
  double mass = 0.0;
  double length = 1.0;         // delta^gen, in units of the diameter
};

struct DyadicTree {
  double delta = 0.5;
  double scale = 1.0;  // raw diameter used for normalisation
  std::vector<Cube> cubes;
  std::vector<std::vector<int>> generations;  // cube ids per generation
  std::vector<std::vector<int>> owner;        // owner[g][x] = cube id
  bool complete = false;
  double C1 = 0.0;
  double a0 = 0.0;
  double CX = 1.0;
  int max_children = 0;
  int max_neighbors = 0;

  int depth() const { return static_cast<int>(generations.size()) - 1; }
  int root() const { return 0; }
  const Cube& cube(int id) const { return cubes[id]; }
  int cube_at(int gen, int x) const { return owner[gen][x]; }
  double raw_length(int id) const { return cubes[id].length * scale; }
  bool contains(int outer, int inner) const;
  // Q-hat: Q together with its neighbours, as a sorted point list
  std::vector<int> hat(int id) const;
  std::vector<int> descendants(int id, bool strict) const;
  int ancestor_at(int id, int gen) const;
};

DyadicTree build_tree(const PointSpace& s, double delta = 0.5, int max_depth = 64);

double set_distance(const PointSpace& s, const std::vector<int>& a, const std::vector<int>& b);
double set_diameter(const PointSpace& s, const std::vector<int>& a);

struct TreeValidation {
  bool partition = true;
  bool nesting = true;
  bool diameter = true;
  bool inner_ball = true;
  bool neighbors = true;
  double C1 = 0.0;
  double a0 = 0.0;
  std::string detail;
  bool ok() const { return partition && nesting && diameter && inner_ball && neighbors; }
};

// exhaustive recheck of the dyadic structure, independent of the construction
TreeValidation validate_tree(const PointSpace& s, const DyadicTree& t);

struct BoundaryProfile {
  std::vector<double> t;
  std::vector<double> ratio;
  double C = 0.0;
  double eta = 0.0;
  double residual = 0.0;
  int fitted_points = 0;
};

// ratio(t) = mu{x in Q : rho(x, X \ Q) <= t l(Q)} / mu(Q)
BoundaryProfile small_boundary_profile(const PointSpace& s, const DyadicTree& t, int cube,
                                       const std::vector<double>& t_grid);
// envelope over non-root cubes with at least two points, then a log-log fit
BoundaryProfile tree_boundary_profile(const PointSpace& s, const DyadicTree& t,
                                      const std::vector<double>& t_grid);
std::vector<double> default_boundary_grid();

struct PowerFit {
  double C = 0.0;
  double eta = 0.0;
  double residual = 0.0;
  int points = 0;
};
// least squares of log y against log x over pairs with positive y
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ltb
