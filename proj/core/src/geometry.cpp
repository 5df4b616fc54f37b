#include "ltb/geometry.hpp"

#include "ltb/op.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ltb {

namespace {

double tol_of(const PointSpace& s) { return 1e-9 * std::max(s.diameter(), 1.0); }

// distance of each point to the other side of the open ball B(z, r): rho(x, B^c) inside, rho(y, B) outside
std::vector<double> layer_distances(const PointSpace& s, int z, double r) {
  const int n = s.size();
  std::vector<char> in(n, 0);
  for (int x = 0; x < n; ++x) in[x] = s.rho(z, x) < r;
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (in[x] != in[y]) d[x] = std::min(d[x], s.rho(x, y));
  return d;
}

std::vector<int> ball_points(const PointSpace& s, int w, double R) {
  std::vector<int> out;
  for (int x = 0; x < s.size(); ++x)
    if (s.rho(w, x) < R) out.push_back(x);
  return out;
}

std::vector<int> annulus_points(const PointSpace& s, int z, double inner, double outer) {
  std::vector<int> out;
  for (int x = 0; x < s.size(); ++x) {
    double d = s.rho(z, x);
    if (d >= inner && d < outer) out.push_back(x);
  }
  return out;
}

std::string config_string(const char* what, int z, double r, int w, double R, double scale) {
  std::ostringstream os;
  os << what << " z=" << z << " r=" << r;
  if (w >= 0) os << " w=" << w << " R=" << R;
  os << " scale=" << scale;
  return os.str();
}

}  // namespace

void classify(DecayProfile& p, const DecayThresholds& thr) {
  p.fit = fit_power_law(p.x, p.ratio);
  p.pass = p.fit.points >= 2 && p.fit.eta >= thr.eta_min && p.fit.residual <= thr.residual_max;
}

DecayProfile layer_profile(const PointSpace& s, int z, double r, const std::vector<double>& eps_grid) {
  const double mB = s.ball_mass(z, r);
  if (!(mB > 0)) throw InvalidArgument("empty ball");
  std::vector<double> d = layer_distances(s, z, r);
  const double tol = tol_of(s);
  DecayProfile p;
  p.configs = 1;
  for (double eps : eps_grid) {
    double m = 0.0;
    for (int x = 0; x < s.size(); ++x)
      if (d[x] <= eps + tol) m += s.weight(x);
    p.x.push_back(eps / r);
    p.ratio.push_back(m / mB);
  }
  classify(p, {});
  return p;
}

DecayProfile relative_layer_profile(const PointSpace& s, int z, double r, int w, double R,
                                    const std::vector<double>& eps_grid) {
  if (s.rho(w, z) < R) throw InvalidArgument("z must lie outside B(w, R)");
  std::vector<int> BW = ball_points(s, w, R);
  const double mW = s.mass(BW);
  if (!(mW > 0)) throw InvalidArgument("empty exterior ball");
  std::vector<double> d = layer_distances(s, z, r);
  const double tol = tol_of(s);
  DecayProfile p;
  p.configs = 1;
  for (double eps : eps_grid) {
    double m = 0.0;
    for (int x : BW)
      if (d[x] <= eps + tol) m += s.weight(x);
    p.x.push_back(eps / R);
    p.ratio.push_back(m / mW);
  }
  classify(p, {});
  return p;
}

DecayProfile annular_profile(const PointSpace& s, int z, double r, const std::vector<double>& s_grid) {
  const double mB = s.ball_mass(z, r);
  if (!(mB > 0)) throw InvalidArgument("empty ball");
  DecayProfile p;
  p.configs = 1;
  for (double sw : s_grid) {
    if (!(sw > 0 && sw <= r)) throw InvalidArgument("annulus width must lie in (0, r]");
    double m = s.mass(annulus_points(s, z, r - sw, r));
    p.x.push_back(sw / r);
    p.ratio.push_back(m / mB);
  }
  classify(p, {});
  return p;
}

DecayProfile relative_annular_profile(const PointSpace& s, int z, double r, int w, double R,
                                      const std::vector<double>& s_grid) {
  if (s.rho(w, z) < R) throw InvalidArgument("z must lie outside B(w, R)");
  std::vector<int> BW = ball_points(s, w, R);
  const double mW = s.mass(BW);
  if (!(mW > 0)) throw InvalidArgument("empty exterior ball");
  DecayProfile p;
  p.configs = 1;
  for (double sw : s_grid) {
    if (!(sw > 0 && sw <= r)) throw InvalidArgument("annulus width must lie in (0, r]");
    double m = 0.0;
    for (int x : BW) {
      double dz = s.rho(z, x);
      if (dz >= r - sw && dz < r) m += s.weight(x);
    }
    p.x.push_back(sw / R);
    p.ratio.push_back(m / mW);
  }
  classify(p, {});
  return p;
}

std::vector<int> sample_centers(const PointSpace& s, int count) {
  const int n = s.size();
  std::vector<int> out;
  if (count >= n) {
    for (int x = 0; x < n; ++x) out.push_back(x);
    return out;
  }
  for (int k = 0; k < count; ++k) out.push_back(static_cast<int>((static_cast<long long>(k) * n) / count));
  return out;
}

namespace {

struct Envelope {
  std::vector<double> x;
  std::vector<double> best;
  std::vector<std::string> witness;
  int configs = 0;

  explicit Envelope(const std::vector<double>& grid) : x(grid), best(grid.size(), 0.0), witness(grid.size()) {}

  void offer(std::size_t k, double v, const std::string& w) {
    if (v > best[k]) {
      best[k] = v;
      witness[k] = w;
    }
  }

  DecayProfile finish(const DecayThresholds& thr) const {
    DecayProfile p;
    p.configs = configs;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (best[k] <= 0) continue;
      p.x.push_back(x[k]);
      p.ratio.push_back(best[k]);
    }
    classify(p, thr);
    for (std::size_t k = x.size(); k-- > 0;)
      if (best[k] > 0) {
        p.witness = witness[k];
        break;
      }
    return p;
  }
};

std::vector<double> radius_grid(const PointSpace& s, double floor) {
  std::vector<double> out;
  for (double r = s.diameter() / 2; r >= 4 * floor; r /= 2) out.push_back(r);
  return out;
}

// exterior balls B(w, R) with z outside and radii r placing the boundary of B(z, r) across B(w, R)
template <class F>
void relative_configs(const PointSpace& s, const GeometryOptions& opt, F&& visit) {
  const double floor = opt.floor_factor * s.resolution();
  std::vector<int> centers = sample_centers(s, opt.centers);
  for (int z : centers)
    for (int w : centers) {
      if (w == z) continue;
      const double dzw = s.rho(z, w);
      for (double R : {dzw, dzw / 2, dzw / 4}) {
        if (R < 2 * floor) continue;
        for (double r : {dzw - R / 2, dzw, dzw + R / 2}) {
          if (r < 2 * floor) continue;
          visit(z, r, w, R);
        }
      }
    }
}

}  // namespace

DecayProfile layer_decay(const PointSpace& s, const GeometryOptions& opt, bool relative) {
  const double floor = opt.floor_factor * s.resolution();
  const double tol = tol_of(s);
  Envelope env(opt.x_grid);
  if (!relative) {
    for (int z : sample_centers(s, opt.centers))
      for (double r : radius_grid(s, floor)) {
        const double mB = s.ball_mass(z, r);
        if (!(mB > 0)) continue;
        std::vector<double> d = layer_distances(s, z, r);
        ++env.configs;
        for (std::size_t k = 0; k < opt.x_grid.size(); ++k) {
          const double eps = opt.x_grid[k] * r;
          if (eps < floor) continue;
          double m = 0.0;
          for (int x = 0; x < s.size(); ++x)
            if (d[x] <= eps + tol) m += s.weight(x);
          env.offer(k, m / mB, config_string("layer", z, r, -1, 0, eps));
        }
      }
  } else {
    relative_configs(s, opt, [&](int z, double r, int w, double R) {
      std::vector<int> BW = ball_points(s, w, R);
      const double mW = s.mass(BW);
      if (!(mW > 0)) return;
      std::vector<double> d = layer_distances(s, z, r);
      ++env.configs;
      for (std::size_t k = 0; k < opt.x_grid.size(); ++k) {
        const double eps = opt.x_grid[k] * R;
        if (eps < floor) continue;
        double m = 0.0;
        for (int x : BW)
          if (d[x] <= eps + tol) m += s.weight(x);
        env.offer(k, m / mW, config_string("relative-layer", z, r, w, R, eps));
      }
    });
  }
  return env.finish(opt.thresholds);
}

DecayProfile annular_decay(const PointSpace& s, const GeometryOptions& opt, bool relative) {
  const double floor = opt.floor_factor * s.resolution();
  Envelope env(opt.x_grid);
  if (!relative) {
    for (int z : sample_centers(s, opt.centers))
      for (double r : radius_grid(s, floor)) {
        const double mB = s.ball_mass(z, r);
        if (!(mB > 0)) continue;
        ++env.configs;
        for (std::size_t k = 0; k < opt.x_grid.size(); ++k) {
          const double sw = opt.x_grid[k] * r;
          if (sw < floor || sw >= r) continue;
          double m = s.mass(annulus_points(s, z, r - sw, r));
          env.offer(k, m / mB, config_string("annular", z, r, -1, 0, sw));
        }
      }
  } else {
    relative_configs(s, opt, [&](int z, double r, int w, double R) {
      std::vector<int> BW = ball_points(s, w, R);
      const double mW = s.mass(BW);
      if (!(mW > 0)) return;
      ++env.configs;
      for (std::size_t k = 0; k < opt.x_grid.size(); ++k) {
        const double sw = opt.x_grid[k] * R;
        if (sw < floor || sw >= r) continue;
        double m = 0.0;
        for (int x : BW) {
          double dz = s.rho(z, x);
          if (dz >= r - sw && dz < r) m += s.weight(x);
        }
        env.offer(k, m / mW, config_string("relative-annular", z, r, w, R, sw));
      }
    });
  }
  return env.finish(opt.thresholds);
}

std::vector<double> default_u_grid(const PointSpace& s, double floor_factor) {
  std::vector<double> out;
  const double h = s.resolution();
  for (double u = floor_factor * h; u <= s.diameter() / 2 * (1 + 1e-12); u *= 2) out.push_back(u);
  return out;
}

GeodesicProfile monotone_geodesic_constant(const PointSpace& s, const std::vector<double>& u_grid,
                                           double threshold) {
  const int n = s.size();
  const double tol = tol_of(s);
  GeodesicProfile g;
  g.threshold = threshold;
  for (double u : u_grid) {
    if (u < s.resolution() * (1 - 1e-12)) throw InvalidArgument("u below the resolution of the space");
    double worst = 0.0;
    int wx = -1, wy = -1;
    for (int x = 0; x < n; ++x) {
      const auto& ord = s.order(x);
      const auto& sd = s.sorted_dist(x);
      for (int y = 0; y < n; ++y) {
        const double dxy = s.rho(x, y);
        if (dxy < u - tol) continue;
        const double lim = dxy - u + tol;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n && sd[k] <= lim; ++k) {
          best = std::min(best, s.rho(ord[k], y));
          if (best <= u + tol) break;
        }
        const double c = best / u;
        if (c > worst) {
          worst = c;
          wx = x;
          wy = y;
        }
      }
    }
    g.u.push_back(u);
    g.C.push_back(worst);
    g.wx.push_back(wx);
    g.wy.push_back(wy);
    g.overall = std::max(g.overall, worst);
  }
  g.pass = !g.u.empty() && g.overall <= threshold;
  return g;
}

BallHardy hardy_ball(const PointSpace& s, int z, double r, double nu, int trials, std::uint64_t seed) {
  BallHardy b;
  b.center = z;
  b.radius = r;
  std::vector<int> inner = ball_points(s, z, r);
  std::vector<int> outer = annulus_points(s, z, r, 2 * r);
  b.inner = static_cast<int>(inner.size());
  b.outer = static_cast<int>(outer.size());
  if (outer.empty()) throw InvalidArgument("2B \\ B is empty");
  if (inner.empty()) throw InvalidArgument("B is empty");
  b.estimate = hardy_constant(s, outer, inner, nu, trials, seed);
  return b;
}

HardyFamily hardy_on_balls(const PointSpace& s, const std::vector<int>& centers, const std::vector<double>& radii,
                           double nu, int trials, std::uint64_t seed) {
  HardyFamily fam;
  fam.nu = nu;
  for (double r : radii) {
    double best = 0.0;
    bool any = false;
    for (int z : centers) {
      try {
        BallHardy b = hardy_ball(s, z, r, nu, trials, seed);
        best = std::max(best, b.estimate.value);
        any = true;
        fam.balls.push_back(b);
      } catch (const InvalidArgument&) {
        ++fam.skipped;
      }
    }
    if (!any) continue;
    fam.radii.push_back(r);
    fam.per_radius.push_back(best);
    fam.max_value = std::max(fam.max_value, best);
  }
  if (!fam.per_radius.empty()) {
    auto [lo, hi] = std::minmax_element(fam.per_radius.begin(), fam.per_radius.end());
    fam.spread = *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  }
  return fam;
}

NormEstimate normalized_hardy(const PointSpace& s, const std::vector<int>& inner, const std::vector<int>& outer,
                              double nu1, double nu2, int trials, std::uint64_t seed) {
  if (!(nu1 > 1 && nu2 > 1) || !(1.0 / nu1 + 1.0 / nu2 < 1.0))
    throw InvalidArgument("normalised Hardy check needs 1/nu1 + 1/nu2 < 1");
  if (inner.empty() || outer.empty()) throw InvalidArgument("empty region");
  const double mB = s.mass(inner);
  const double nu1p = conj_exponent(nu1), nu2p = conj_exponent(nu2);
  RMat M(inner.size(), outer.size());
  for (std::size_t a = 0; a < inner.size(); ++a)
    for (std::size_t b = 0; b < outer.size(); ++b) {
      const int x = inner[a], y = outer[b];
      const double mx = s.weight(x) / mB, my = s.weight(y) / mB;
      M(a, b) = mB * std::pow(mx, 1.0 / nu2p) * std::pow(my, 1.0 / nu1p) / s.lambda(x, y);
    }
  return positive_norm(M, nu1, nu2p, trials, seed);
}

NormEstimate normalized_hardy_ball(const PointSpace& s, int z, double r, double nu1, double nu2, int trials,
                                   std::uint64_t seed) {
  return normalized_hardy(s, ball_points(s, z, r), annulus_points(s, z, r, 2 * r), nu1, nu2, trials, seed);
}

NormEstimate normalized_hardy_cube(const PointSpace& s, const DyadicTree& t, int cube, double nu1, double nu2,
                                   int trials, std::uint64_t seed) {
  const auto& Q = t.cube(cube).members;
  std::vector<int> outer;
  for (int nb : t.cube(cube).neighbors)
    outer.insert(outer.end(), t.cube(nb).members.begin(), t.cube(nb).members.end());
  std::sort(outer.begin(), outer.end());
  return normalized_hardy(s, Q, outer, nu1, nu2, trials, seed);
}

std::vector<int> embed_by_coordinates(const PointSpace& full, const PointSpace& sub, double tol) {
  if (full.dim() == 0 || sub.dim() != full.dim()) throw InvalidArgument("embedding needs matching coordinates");
  std::vector<int> map(sub.size(), -1);
  for (int i = 0; i < sub.size(); ++i) {
    for (int j = 0; j < full.size(); ++j)
      if ((full.coords().row(j) - sub.coords().row(i)).norm() <= tol) {
        map[i] = j;
        break;
      }
    if (map[i] < 0) throw InvalidArgument("point " + std::to_string(i) + " of the subspace is not in the full space");
  }
  return map;
}

RestrictionReport restriction_stability(const PointSpace& full, const PointSpace& sub,
                                        const std::vector<int>& centers, const std::vector<double>& radii,
                                        double nu, int trials, std::uint64_t seed) {
  RestrictionReport rep;
  rep.embedding = embed_by_coordinates(full, sub);
  std::vector<char> inX(full.size(), 0);
  for (int j : rep.embedding) inX[j] = 1;
  for (int j : rep.embedding) {
    const auto& ord = full.order(j);
    const auto& sd = full.sorted_dist(j);
    double all = 0.0, part = 0.0;
    for (int k = 0; k < full.size(); ++k) {
      all += full.weight(ord[k]);
      if (inX[ord[k]]) part += full.weight(ord[k]);
      if (k + 1 == full.size() || sd[k + 1] > sd[k]) rep.kappa = std::max(rep.kappa, all / part);
    }
  }
  std::vector<int> fcenters;
  for (int z : centers) fcenters.push_back(rep.embedding.at(z));
  HardyFamily hs = hardy_on_balls(sub, centers, radii, nu, trials, seed);
  HardyFamily hf = hardy_on_balls(full, fcenters, radii, nu, trials, seed);
  rep.hardy_sub = hs.max_value;
  rep.hardy_full = hf.max_value;
  rep.ratio = rep.hardy_full > 0 ? rep.hardy_sub / rep.hardy_full : std::numeric_limits<double>::infinity();
  rep.within_kappa = rep.hardy_sub <= rep.kappa * rep.hardy_full * (1 + 1e-9);
  return rep;
}

ImplicationReport implication_study(const PointSpace& s, const GeometryOptions& opt) {
  ImplicationReport rep;
  rep.geodesic = monotone_geodesic_constant(s, default_u_grid(s, opt.floor_factor), opt.geodesic_threshold);
  rep.relative_annular = annular_decay(s, opt, true);
  rep.relative_layer = layer_decay(s, opt, true);
  rep.annular = annular_decay(s, opt, false);
  rep.layer = layer_decay(s, opt, false);
  std::vector<double> radii;
  for (int k : {16, 8, 4}) {
    double r = s.diameter() / k;
    if (r >= 2 * opt.floor_factor * s.resolution()) radii.push_back(r);
  }
  rep.hardy = hardy_on_balls(s, sample_centers(s, std::min(opt.centers, 8)), radii, opt.nu, opt.trials, opt.seed);
  rep.hardy_bounded = !rep.hardy.per_radius.empty() && rep.hardy.spread <= 2.0;
  if (rep.geodesic.pass && !rep.relative_annular.pass) {
    rep.link_geodesic_annular = false;
    rep.violations.push_back("monotone geodesic holds but relative annular decay fails: " +
                             rep.relative_annular.witness);
  }
  if (rep.relative_annular.pass && !rep.relative_layer.pass) {
    rep.link_annular_layer = false;
    rep.violations.push_back("relative annular decay holds but relative layer decay fails: " +
                             rep.relative_layer.witness);
  }
  if (rep.relative_layer.pass && !rep.hardy_bounded) {
    rep.link_layer_hardy = false;
    rep.violations.push_back("relative layer decay holds but ball Hardy constants vary across scales");
  }
  return rep;
}

}  // namespace ltb
