#include "ltb/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace ltb {

bool DyadicTree::contains(int outer, int inner) const {
  if (cubes[inner].gen < cubes[outer].gen) return false;
  return ancestor_at(inner, cubes[outer].gen) == outer;
}

int DyadicTree::ancestor_at(int id, int gen) const {
  while (id >= 0 && cubes[id].gen > gen) id = cubes[id].parent;
  return id;
}

std::vector<int> DyadicTree::hat(int id) const {
  std::vector<int> out = cubes[id].members;
  for (int nb : cubes[id].neighbors) out.insert(out.end(), cubes[nb].members.begin(), cubes[nb].members.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> DyadicTree::descendants(int id, bool strict) const {
  std::vector<int> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    if (c != id || !strict) out.push_back(c);
    for (auto it = cubes[c].children.rbegin(); it != cubes[c].children.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double set_distance(const PointSpace& s, const std::vector<int>& a, const std::vector<int>& b) {
  double d = std::numeric_limits<double>::infinity();
  for (int x : a)
    for (int y : b) d = std::min(d, s.rho(x, y));
  return d;
}

double set_diameter(const PointSpace& s, const std::vector<int>& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) d = std::max(d, s.rho(a[i], a[j]));
  return d;
}

namespace {

// distance from x to the complement of its generation-g cube, normalised
double exit_distance(const PointSpace& s, const DyadicTree& t, int g, int x) {
  const int id = t.owner[g][x];
  const auto& o = s.order(x);
  for (int y : o) {
    if (t.owner[g][y] != id) return s.rho(x, y) / t.scale;
  }
  return std::numeric_limits<double>::infinity();
}

void compute_neighbors(const PointSpace& s, DyadicTree& t, int g) {
  const int n = s.size();
  const double thr = std::pow(t.delta, g) * t.scale;
  std::vector<std::set<int>> nb(t.cubes.size());
  const auto& own = t.owner[g];
  for (int x = 0; x < n; ++x) {
    const auto& o = s.order(x);
    const auto& sd = s.sorted_dist(x);
    for (int k = 1; k < n && sd[k] < thr; ++k) {
      int y = o[k];
      if (own[x] != own[y]) nb[own[x]].insert(own[y]);
    }
  }
  for (int id : t.generations[g]) {
    t.cubes[id].neighbors.assign(nb[id].begin(), nb[id].end());
    t.max_neighbors = std::max(t.max_neighbors, static_cast<int>(t.cubes[id].neighbors.size()));
  }
}

}  // namespace

DyadicTree build_tree(const PointSpace& s, double delta, int max_depth) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (max_depth < 0) throw InvalidArgument("max_depth must be nonnegative");
  const int n = s.size();
  DyadicTree t;
  t.delta = delta;
  t.scale = s.diameter() > 0 ? s.diameter() : 1.0;

  Cube root;
  root.id = 0;
  root.gen = 0;
  root.members.resize(n);
  std::iota(root.members.begin(), root.members.end(), 0);
  root.center = 0;
  root.mass = s.total_mass();
  root.length = 1.0;
  t.cubes.push_back(root);
  t.generations.push_back({0});
  t.owner.push_back(std::vector<int>(n, 0));

  auto all_singletons = [&](int g) {
    for (int id : t.generations[g])
      if (t.cubes[id].members.size() > 1) return false;
    return true;
  };

  int g = 0;
  while (!all_singletons(g) && g < max_depth) {
    const int ng = g + 1;
    const double len = std::pow(delta, ng);
    const double sep = len * t.scale;
    std::vector<int> gen_ids;
    std::vector<int> own(n, -1);
    for (int pid : t.generations[g]) {
      const std::vector<int> pm = t.cubes[pid].members;
      std::vector<int> centers;
      for (int c : pm) {
        bool ok = true;
        for (int z : centers) {
          if (s.rho(c, z) < sep) {
            ok = false;
            break;
          }
        }
        if (ok) centers.push_back(c);
      }
      std::vector<std::vector<int>> groups(centers.size());
      for (int x : pm) {
        std::size_t best = 0;
        double bd = s.rho(x, centers[0]);
        for (std::size_t k = 1; k < centers.size(); ++k) {
          double d = s.rho(x, centers[k]);
          if (d < bd) {
            bd = d;
            best = k;
          }
        }
        groups[best].push_back(x);
      }
      for (std::size_t k = 0; k < centers.size(); ++k) {
        Cube c;
        c.id = static_cast<int>(t.cubes.size());
        c.gen = ng;
        c.center = centers[k];
        c.parent = pid;
        c.members = std::move(groups[k]);
        c.mass = s.mass(c.members);
        c.length = len;
        for (int x : c.members) own[x] = c.id;
        t.cubes[pid].children.push_back(c.id);
        gen_ids.push_back(c.id);
        t.cubes.push_back(std::move(c));
      }
    }
    t.generations.push_back(std::move(gen_ids));
    t.owner.push_back(std::move(own));
    g = ng;
  }
  t.complete = all_singletons(g);
  if (t.complete) {
    for (int id : t.generations[g]) t.cubes[id].children.clear();
  }

  for (int gg = 0; gg <= t.depth(); ++gg) compute_neighbors(s, t, gg);

  t.C1 = 0.0;
  t.a0 = std::numeric_limits<double>::infinity();
  t.CX = 1.0;
  for (const Cube& c : t.cubes) {
    t.C1 = std::max(t.C1, set_diameter(s, c.members) / t.scale / c.length);
    if (static_cast<int>(c.members.size()) < n) {
      t.a0 = std::min(t.a0, exit_distance(s, t, c.gen, c.center) / c.length);
    }
    t.max_children = std::max(t.max_children, static_cast<int>(c.children.size()));
    for (int ch : c.children) t.CX = std::max(t.CX, c.mass / t.cubes[ch].mass);
  }
  if (!std::isfinite(t.a0)) t.a0 = 1.0;
  return t;
}

TreeValidation validate_tree(const PointSpace& s, const DyadicTree& t) {
  TreeValidation v;
  const int n = s.size();
  const double eps = 1e-12;
  v.a0 = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= t.depth(); ++g) {
    std::vector<int> hits(n, 0);
    for (int id : t.generations[g]) {
      for (int x : t.cube(id).members) hits[x]++;
    }
    for (int x = 0; x < n; ++x) {
      if (hits[x] != 1) {
        v.partition = false;
        v.detail = "generation " + std::to_string(g) + " does not partition the space";
      }
    }
  }
  for (const Cube& c : t.cubes) {
    if (!c.children.empty()) {
      std::vector<int> u;
      for (int ch : c.children) {
        const Cube& d = t.cube(ch);
        if (d.gen != c.gen + 1 || d.parent != c.id) v.nesting = false;
        u.insert(u.end(), d.members.begin(), d.members.end());
      }
      std::sort(u.begin(), u.end());
      if (u != c.members) {
        v.nesting = false;
        v.detail = "children of cube " + std::to_string(c.id) + " do not partition it";
      }
    } else if (c.gen != t.depth()) {
      v.nesting = false;
      v.detail = "childless cube above the last generation";
    }
    const double len = std::pow(t.delta, c.gen);
    double dn = set_diameter(s, c.members) / t.scale;
    v.C1 = std::max(v.C1, dn / len);
    std::vector<int> rest;
    for (int x = 0, k = 0; x < n; ++x) {
      if (k < static_cast<int>(c.members.size()) && c.members[k] == x) {
        ++k;
      } else {
        rest.push_back(x);
      }
    }
    if (!rest.empty()) {
      double a = set_distance(s, {c.center}, rest) / t.scale / len;
      v.a0 = std::min(v.a0, a);
    }
    if (std::find(c.members.begin(), c.members.end(), c.center) == c.members.end()) {
      v.inner_ball = false;
      v.detail = "cube centre outside its cube";
    }
  }
  if (!(v.C1 < 2.0)) {
    v.diameter = false;
    v.detail = "diameter constant not below 2";
  }
  if (!std::isfinite(v.a0)) v.a0 = 1.0;
  if (!(v.a0 > 0.0)) v.inner_ball = false;
  for (const Cube& c : t.cubes) {
    auto ball = s.ball(c.center, v.a0 * std::pow(t.delta, c.gen) * t.scale * (1.0 - eps));
    for (int x : ball) {
      if (!std::binary_search(c.members.begin(), c.members.end(), x)) {
        v.inner_ball = false;
        v.detail = "inner ball escapes cube " + std::to_string(c.id);
      }
    }
  }
  for (int g = 0; g <= t.depth(); ++g) {
    const double thr = std::pow(t.delta, g);
    const auto& ids = t.generations[g];
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const Cube& A = t.cube(ids[a]);
      for (std::size_t b = 0; b < ids.size(); ++b) {
        if (a == b) continue;
        const Cube& B = t.cube(ids[b]);
        bool listed = std::binary_search(A.neighbors.begin(), A.neighbors.end(), B.id);
        bool close = set_distance(s, A.members, B.members) / t.scale < thr;
        if (listed != close) {
          v.neighbors = false;
          v.detail = "neighbour lists inconsistent at generation " + std::to_string(g);
        }
      }
    }
  }
  return v;
}

std::vector<double> default_boundary_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 8; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  PowerFit f;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  f.points = static_cast<int>(lx.size());
  if (lx.size() < 2) return f;
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  sx /= m;
  sy /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - sx) * (lx[i] - sx);
    sxy += (lx[i] - sx) * (ly[i] - sy);
  }
  if (sxx <= 0) return f;
  f.eta = sxy / sxx;
  double icpt = sy - f.eta * sx;
  f.C = std::exp(icpt);
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double r = ly[i] - (icpt + f.eta * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / m);
  return f;
}

BoundaryProfile small_boundary_profile(const PointSpace& s, const DyadicTree& t, int cube,
                                       const std::vector<double>& t_grid) {
  const Cube& c = t.cube(cube);
  if (static_cast<int>(c.members.size()) == s.size()) throw InvalidArgument("cube has no exterior");
  BoundaryProfile p;
  p.t = t_grid;
  std::vector<double> d;
  d.reserve(c.members.size());
  for (int x : c.members) d.push_back(exit_distance(s, t, c.gen, x));
  for (double tt : t_grid) {
    double thr = tt * c.length * (1.0 + 1e-12);
    double m = 0.0;
    for (std::size_t k = 0; k < c.members.size(); ++k)
      if (d[k] <= thr) m += s.weight(c.members[k]);
    p.ratio.push_back(m / c.mass);
  }
  PowerFit f = fit_power_law(p.t, p.ratio);
  p.C = f.C;
  p.eta = f.eta;
  p.residual = f.residual;
  p.fitted_points = f.points;
  return p;
}

BoundaryProfile tree_boundary_profile(const PointSpace& s, const DyadicTree& t,
                                      const std::vector<double>& t_grid) {
  BoundaryProfile env;
  env.t = t_grid;
  env.ratio.assign(t_grid.size(), 0.0);
  for (const Cube& c : t.cubes) {
    if (c.gen == 0 || c.members.size() < 2 || static_cast<int>(c.members.size()) == s.size()) continue;
    BoundaryProfile p = small_boundary_profile(s, t, c.id, t_grid);
    for (std::size_t k = 0; k < t_grid.size(); ++k) env.ratio[k] = std::max(env.ratio[k], p.ratio[k]);
  }
  PowerFit f = fit_power_law(env.t, env.ratio);
  env.C = f.C;
  env.eta = f.eta;
  env.residual = f.residual;
  env.fitted_points = f.points;
  return env;
}

}  // namespace ltb
