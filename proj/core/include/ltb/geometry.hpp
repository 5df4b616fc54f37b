#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltb/dyadic.hpp"
#include "ltb/norms.hpp"
#include "ltb/space.hpp"

namespace ltb {

struct DecayThresholds {
  double eta_min = 0.2;
  double residual_max = 0.15;
};

struct DecayProfile {
  std::vector<double> x;      // eps / r, s / r, eps / R or s / R
  std::vector<double> ratio;  // measured ratio, or the envelope over configurations
  PowerFit fit;
  bool pass = false;
  int configs = 0;
  std::string witness;  // configuration realising the envelope at the smallest scale
};

void classify(DecayProfile& p, const DecayThresholds& thr);

// mu(B_eps) / mu(B), B = B(z, r), B_eps = inner and outer eps-layers
DecayProfile layer_profile(const PointSpace& s, int z, double r, const std::vector<double>& eps_grid);
// mu(B_eps cap B(w, R)) / mu(B(w, R)); requires z outside B(w, R)
DecayProfile relative_layer_profile(const PointSpace& s, int z, double r, int w, double R,
                                    const std::vector<double>& eps_grid);
// mu(C_{r, r-s}(z)) / mu(B(z, r))
DecayProfile annular_profile(const PointSpace& s, int z, double r, const std::vector<double>& s_grid);
// mu(C_{r, r-s}(z) cap B(w, R)) / mu(B(w, R)); requires z outside B(w, R)
DecayProfile relative_annular_profile(const PointSpace& s, int z, double r, int w, double R,
                                      const std::vector<double>& s_grid);

struct GeometryOptions {
  int centers = 16;                   // sampled centres z (and w)
  std::vector<double> x_grid = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
  double floor_factor = 2.0;          // scales below floor_factor * h are skipped
  DecayThresholds thresholds;
  double geodesic_threshold = 1.5;
  double nu = 2.0;
  int trials = 2000;
  std::uint64_t seed = 1;
};

// envelopes over sampled configurations, fitted against x
DecayProfile layer_decay(const PointSpace& s, const GeometryOptions& opt, bool relative);
DecayProfile annular_decay(const PointSpace& s, const GeometryOptions& opt, bool relative);

struct GeodesicProfile {
  std::vector<double> u;
  std::vector<double> C;
  std::vector<int> wx, wy;  // witnessing pair per u
  double overall = 0.0;
  double threshold = 1.5;
  bool pass = false;
};

// u = 2h, 4h, ... up to diam / 2
std::vector<double> default_u_grid(const PointSpace& s, double floor_factor = 2.0);
// exact C(u) = max over rho(x, y) >= u of min over z with rho(z, x) <= rho(y, x) - u of rho(z, y) / u
GeodesicProfile monotone_geodesic_constant(const PointSpace& s, const std::vector<double>& u_grid,
                                           double threshold = 1.5);

struct BallHardy {
  int center = -1;
  double radius = 0.0;
  int inner = 0;  // points of B
  int outer = 0;  // points of 2B \ B
  NormEstimate estimate;
};

// best ball Hardy constant for one ball: g on B in L^{nu'}, f on 2B \ B in L^nu
BallHardy hardy_ball(const PointSpace& s, int z, double r, double nu, int trials = 2000, std::uint64_t seed = 1);

struct HardyFamily {
  double nu = 2.0;
  std::vector<BallHardy> balls;
  std::vector<double> radii;
  std::vector<double> per_radius;  // max over centres per radius
  double max_value = 0.0;
  double spread = 0.0;             // max / min of per_radius
  int skipped = 0;
};

HardyFamily hardy_on_balls(const PointSpace& s, const std::vector<int>& centers, const std::vector<double>& radii,
                           double nu, int trials = 2000, std::uint64_t seed = 1);

// sup of I / mu(B) over ||f||_{L^nu1(outer, dmu / mu(B))} ||g||_{L^nu2(inner, dmu / mu(B))}
NormEstimate normalized_hardy(const PointSpace& s, const std::vector<int>& inner, const std::vector<int>& outer,
                              double nu1, double nu2, int trials = 2000, std::uint64_t seed = 1);
NormEstimate normalized_hardy_ball(const PointSpace& s, int z, double r, double nu1, double nu2, int trials = 2000,
                                   std::uint64_t seed = 1);
// Q against Q-hat minus Q
NormEstimate normalized_hardy_cube(const PointSpace& s, const DyadicTree& t, int cube, double nu1, double nu2,
                                   int trials = 2000, std::uint64_t seed = 1);

struct RestrictionReport {
  std::vector<int> embedding;  // sub point -> full point
  double kappa = 0.0;          // max mu(B_full) / mu(B_full cap X)
  double hardy_sub = 0.0;
  double hardy_full = 0.0;
  double ratio = 0.0;          // hardy_sub / hardy_full
  bool within_kappa = false;
};

// points are matched by coordinates
std::vector<int> embed_by_coordinates(const PointSpace& full, const PointSpace& sub, double tol = 1e-9);
RestrictionReport restriction_stability(const PointSpace& full, const PointSpace& sub,
                                        const std::vector<int>& centers, const std::vector<double>& radii,
                                        double nu, int trials = 2000, std::uint64_t seed = 1);

struct ImplicationReport {
  GeodesicProfile geodesic;
  DecayProfile relative_annular;
  DecayProfile relative_layer;
  DecayProfile annular;
  DecayProfile layer;
  HardyFamily hardy;
  bool hardy_bounded = false;  // spread across scales at most 2
  bool link_geodesic_annular = true;
  bool link_annular_layer = true;
  bool link_layer_hardy = true;
  std::vector<std::string> violations;
};

ImplicationReport implication_study(const PointSpace& s, const GeometryOptions& opt = {});

// sampled centres: evenly spaced indices
std::vector<int> sample_centers(const PointSpace& s, int count);

}  // namespace ltb
