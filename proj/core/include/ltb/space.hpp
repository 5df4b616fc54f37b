#pragma once

#include <array>
#include <string>
#include <vector>

#include "ltb/common.hpp"

namespace ltb {

// Finite metric measure space with a dense distance matrix.
class PointSpace {
 public:
  PointSpace() = default;

  int size() const { return static_cast<int>(mu_.size()); }
  int dim() const { return static_cast<int>(coords_.cols()); }
  const std::string& kind() const { return kind_; }
  const RMat& coords() const { return coords_; }
  const RMat& dist() const { return dist_; }
  const RVec& mu() const { return mu_; }
  double rho(int i, int j) const { return dist_(i, j); }
  double weight(int i) const { return mu_[i]; }
  double diameter() const { return diameter_; }
  double resolution() const { return resolution_; }
  double total_mass() const { return total_mass_; }

  // points sorted by distance from x (ties by index) with matching distances
  const std::vector<int>& order(int x) const { return order_[x]; }
  const std::vector<double>& sorted_dist(int x) const { return sorted_[x]; }

  // open ball B(x, r) = {y : rho(x, y) < r}
  double ball_mass(int x, double r) const;
  int ball_count(int x, double r) const;
  std::vector<int> ball(int x, double r) const;
  double lambda(int x, int y) const { return ball_mass(x, dist_(x, y)); }
  double mass(const std::vector<int>& pts) const;

  friend PointSpace make_space(std::string kind, RMat dist, RVec mu, RMat coords);

 private:
  std::string kind_;
  RMat coords_;
  RMat dist_;
  RVec mu_;
  double diameter_ = 0.0;
  double resolution_ = 0.0;
  double total_mass_ = 0.0;
  std::vector<std::vector<int>> order_;
  std::vector<std::vector<double>> sorted_;
  std::vector<std::vector<double>> prefix_;
};

// Validates (distinct points, positive weights, symmetry, zero diagonal) and indexes.
PointSpace make_space(std::string kind, RMat dist, RVec mu, RMat coords = RMat());

PointSpace from_points(const RMat& coords, const RVec& mu, std::string kind = "points");
PointSpace from_distance_matrix(const RMat& dist, const RVec& mu, std::string kind = "matrix");
// shortest-path metric on a weighted undirected graph
PointSpace from_edges(int n, const std::vector<std::array<double, 3>>& edges, const RVec& mu,
                      std::string kind = "graph");
PointSpace subspace(const PointSpace& s, const std::vector<int>& idx);

struct GenParams {
  int n = 64;
  double h = 0.0;
  int nx = 16;
  int ny = 16;
  std::vector<std::array<double, 2>> segments{{0.0, 1.0}, {2.0, 3.0}};
  std::vector<std::array<double, 2>> vertices{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  double circumference = 1.0;
  int level = 5;
  std::string file;
  // multiplicative weight jitter exp(U(-j, j)); 0 keeps the generator weights
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

// kinds: uniform-line, uniform-grid-2d, line-with-gap, triangle-edges, circle,
// cantor-like, matrix-file
PointSpace generate(const std::string& kind, const GenParams& params);
std::vector<std::string> generator_kinds();

struct MetricCheck {
  bool ok = true;
  double worst_triangle_excess = 0.0;
  double worst_asymmetry = 0.0;
  int witness[3] = {-1, -1, -1};
};

MetricCheck check_metric(const RMat& dist, double tol);
MetricCheck check_metric(const PointSpace& s);

struct DoublingReport {
  double constant = 1.0;
  int center = -1;
  double radius = 0.0;
  double lambda_ratio = 1.0;  // max lambda(x,y)/lambda(y,x)
};

DoublingReport doubling_constant(const PointSpace& s);

PointSpace load_space_json(const std::string& path);
void save_space_json(const PointSpace& s, const std::string& path);

}  // namespace ltb
