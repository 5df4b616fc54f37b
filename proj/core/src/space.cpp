#include "ltb/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

namespace ltb {

namespace {

constexpr int kMaxPoints = 4096;

RMat euclidean(const RMat& c) {
  const int n = static_cast<int>(c.rows());
  RMat d = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double v;
      if (c.cols() == 1) {
        v = std::abs(c(i, 0) - c(j, 0));
      } else {
        v = (c.row(i) - c.row(j)).norm();
      }
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

void apply_jitter(RVec& mu, double jitter, std::uint64_t seed) {
  if (jitter <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  for (int i = 0; i < mu.size(); ++i) mu[i] *= std::exp(u(rng));
}

}  // namespace

double PointSpace::ball_mass(int x, double r) const {
  const auto& s = sorted_[x];
  auto k = std::lower_bound(s.begin(), s.end(), r) - s.begin();
  return prefix_[x][k];
}

int PointSpace::ball_count(int x, double r) const {
  const auto& s = sorted_[x];
  return static_cast<int>(std::lower_bound(s.begin(), s.end(), r) - s.begin());
}

std::vector<int> PointSpace::ball(int x, double r) const {
  int k = ball_count(x, r);
  std::vector<int> out(order_[x].begin(), order_[x].begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

double PointSpace::mass(const std::vector<int>& pts) const {
  double m = 0.0;
  for (int i : pts) m += mu_[i];
  return m;
}

PointSpace make_space(std::string kind, RMat dist, RVec mu, RMat coords) {
  const int n = static_cast<int>(mu.size());
  if (n < 1) throw InvalidArgument("space must contain at least one point");
  if (n > kMaxPoints) throw InvalidArgument("space exceeds the 4096 point guardrail");
  if (dist.rows() != n || dist.cols() != n) throw InvalidArgument("distance matrix shape mismatch");
  if (coords.size() > 0 && coords.rows() != n) throw InvalidArgument("coordinate rows mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) throw InvalidArgument("weights must be positive");
  }
  double diam = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) throw InvalidArgument("distance matrix must have zero diagonal");
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(dist(i, j)) || dist(i, j) < 0.0) throw InvalidArgument("distances must be finite and nonnegative");
      diam = std::max(diam, dist(i, j));
    }
  }
  const double tol = 1e-12 * std::max(diam, 1.0);
  double res = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(dist(i, j) - dist(j, i)) > tol) throw InvalidArgument("distance matrix must be symmetric");
      double v = 0.5 * (dist(i, j) + dist(j, i));
      if (v <= 0.0) throw InvalidArgument("duplicate points: zero distance between distinct indices");
      dist(i, j) = v;
      dist(j, i) = v;
      res = std::min(res, v);
    }
  }
  PointSpace s;
  s.kind_ = std::move(kind);
  s.coords_ = std::move(coords);
  s.dist_ = std::move(dist);
  s.mu_ = std::move(mu);
  s.diameter_ = diam;
  s.resolution_ = n > 1 ? res : 0.0;
  s.total_mass_ = s.mu_.sum();
  s.order_.resize(n);
  s.sorted_.resize(n);
  s.prefix_.resize(n);
  for (int x = 0; x < n; ++x) {
    auto& o = s.order_[x];
    o.resize(n);
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return s.dist_(x, a) < s.dist_(x, b); });
    s.sorted_[x].resize(n);
    s.prefix_[x].assign(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
      s.sorted_[x][k] = s.dist_(x, o[k]);
      s.prefix_[x][k + 1] = s.prefix_[x][k] + s.mu_[o[k]];
    }
  }
  return s;
}

PointSpace from_points(const RMat& coords, const RVec& mu, std::string kind) {
  return make_space(std::move(kind), euclidean(coords), mu, coords);
}

PointSpace from_distance_matrix(const RMat& dist, const RVec& mu, std::string kind) {
  double diam = dist.size() ? dist.maxCoeff() : 0.0;
  MetricCheck mc = check_metric(dist, 1e-12 * std::max(diam, 1.0));
  if (!mc.ok) throw InvalidArgument("distance matrix violates the triangle inequality");
  return make_space(std::move(kind), dist, mu);
}

PointSpace from_edges(int n, const std::vector<std::array<double, 3>>& edges, const RVec& mu,
                      std::string kind) {
  const double inf = std::numeric_limits<double>::infinity();
  RMat d = RMat::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : edges) {
    int a = static_cast<int>(e[0]);
    int b = static_cast<int>(e[1]);
    if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
    if (!(e[2] > 0.0)) throw InvalidArgument("edge lengths must be positive");
    d(a, b) = std::min(d(a, b), e[2]);
    d(b, a) = d(a, b);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(d(i, j))) throw InvalidArgument("edge graph is disconnected");
  return make_space(std::move(kind), d, mu);
}

PointSpace subspace(const PointSpace& s, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  RMat d(m, m);
  RVec mu(m);
  RMat c;
  if (s.coords().size() > 0) c.resize(m, s.coords().cols());
  for (int a = 0; a < m; ++a) {
    mu[a] = s.weight(idx[a]);
    if (c.size() > 0) c.row(a) = s.coords().row(idx[a]);
    for (int b = 0; b < m; ++b) d(a, b) = s.rho(idx[a], idx[b]);
  }
  return make_space(s.kind() + "-restricted", d, mu, c);
}

std::vector<std::string> generator_kinds() {
  return {"uniform-line", "uniform-grid-2d", "line-with-gap", "triangle-edges", "circle", "cantor-like", "matrix-file"};
}

PointSpace generate(const std::string& kind, const GenParams& p) {
  if (kind == "uniform-line") {
    if (p.n < 2) throw InvalidArgument("uniform-line needs n >= 2");
    double h = p.h > 0 ? p.h : 1.0 / (p.n - 1);
    RMat c(p.n, 1);
    for (int i = 0; i < p.n; ++i) c(i, 0) = i * h;
    RVec mu = RVec::Constant(p.n, h);
    apply_jitter(mu, p.jitter, p.seed);
    return from_points(c, mu, kind);
  }
  if (kind == "uniform-grid-2d") {
    if (p.nx < 1 || p.ny < 1 || p.nx * p.ny < 2) throw InvalidArgument("grid needs at least two points");
    double h = p.h > 0 ? p.h : 1.0 / (std::max(p.nx, p.ny) - 1);
    const int n = p.nx * p.ny;
    RMat c(n, 2);
    for (int j = 0; j < p.ny; ++j)
      for (int i = 0; i < p.nx; ++i) {
        c(j * p.nx + i, 0) = i * h;
        c(j * p.nx + i, 1) = j * h;
      }
    RVec mu = RVec::Constant(n, h * h);
    apply_jitter(mu, p.jitter, p.seed);
    return from_points(c, mu, kind);
  }
  if (kind == "line-with-gap") {
    double h = p.h > 0 ? p.h : 0.05;
    std::vector<double> xs;
    for (const auto& seg : p.segments) {
      if (!(seg[1] > seg[0])) throw InvalidArgument("segments must have positive length");
      long m = std::lround((seg[1] - seg[0]) / h);
      for (long k = 0; k <= m; ++k) xs.push_back(seg[0] + k * h);
    }
    std::sort(xs.begin(), xs.end());
    RMat c(static_cast<int>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) c(static_cast<int>(i), 0) = xs[i];
    RVec mu = RVec::Constant(static_cast<int>(xs.size()), h);
    apply_jitter(mu, p.jitter, p.seed);
    return from_points(c, mu, kind);
  }
  if (kind == "triangle-edges") {
    double h = p.h > 0 ? p.h : 0.05;
    if (p.vertices.size() != 3) throw InvalidArgument("triangle needs three vertices");
    std::vector<std::array<double, 2>> pts;
    std::vector<double> left, right;
    for (int e = 0; e < 3; ++e) {
      const auto& a = p.vertices[e];
      const auto& b = p.vertices[(e + 1) % 3];
      double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      int m = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
      double step = len / m;
      for (int k = 0; k < m; ++k) {
        double t = static_cast<double>(k) / m;
        pts.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        left.push_back(step);
        right.push_back(step);
      }
    }
    const int n = static_cast<int>(pts.size());
    RMat c(n, 2);
    RVec mu(n);
    for (int i = 0; i < n; ++i) {
      c(i, 0) = pts[i][0];
      c(i, 1) = pts[i][1];
      // half of the outgoing step plus half of the incoming step
      mu[i] = 0.5 * (right[i] + left[(i + n - 1) % n]);
    }
    apply_jitter(mu, p.jitter, p.seed);
    return from_points(c, mu, kind);
  }
  if (kind == "circle") {
    if (p.n < 2) throw InvalidArgument("circle needs n >= 2");
    double L = p.circumference;
    double s = L / p.n;
    RMat d(p.n, p.n);
    for (int i = 0; i < p.n; ++i)
      for (int j = 0; j < p.n; ++j) {
        int k = std::abs(i - j);
        d(i, j) = std::min(k, p.n - k) * s;
      }
    RVec mu = RVec::Constant(p.n, s);
    apply_jitter(mu, p.jitter, p.seed);
    return make_space(kind, d, mu);
  }
  if (kind == "cantor-like") {
    if (p.level < 0 || p.level > 10) throw InvalidArgument("cantor level must be in [0, 10]");
    std::vector<std::array<double, 2>> iv{{0.0, 1.0}};
    for (int l = 0; l < p.level; ++l) {
      std::vector<std::array<double, 2>> next;
      for (const auto& I : iv) {
        double t = (I[1] - I[0]) / 3.0;
        next.push_back({I[0], I[0] + t});
        next.push_back({I[1] - t, I[1]});
      }
      iv.swap(next);
    }
    const int n = static_cast<int>(2 * iv.size());
    RMat c(n, 1);
    for (std::size_t k = 0; k < iv.size(); ++k) {
      c(static_cast<int>(2 * k), 0) = iv[k][0];
      c(static_cast<int>(2 * k + 1), 0) = iv[k][1];
    }
    RVec mu = RVec::Constant(n, 1.0 / n);
    apply_jitter(mu, p.jitter, p.seed);
    return from_points(c, mu, kind);
  }
  if (kind == "matrix-file") {
    if (p.file.empty()) throw InvalidArgument("matrix-file needs a file path");
    return load_space_json(p.file);
  }
  throw InvalidArgument("unknown space kind: " + kind);
}

MetricCheck check_metric(const RMat& d, double tol) {
  MetricCheck mc;
  const int n = static_cast<int>(d.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mc.worst_asymmetry = std::max(mc.worst_asymmetry, std::abs(d(i, j) - d(j, i)));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double dik = d(i, k);
      for (int j = 0; j < n; ++j) {
        double ex = d(i, j) - dik - d(k, j);
        if (ex > mc.worst_triangle_excess) {
          mc.worst_triangle_excess = ex;
          mc.witness[0] = i;
          mc.witness[1] = j;
          mc.witness[2] = k;
        }
      }
    }
  }
  mc.ok = mc.worst_triangle_excess <= tol && mc.worst_asymmetry <= tol;
  return mc;
}

MetricCheck check_metric(const PointSpace& s) {
  return check_metric(s.dist(), 1e-12 * std::max(s.diameter(), 1.0));
}

DoublingReport doubling_constant(const PointSpace& s) {
  DoublingReport rep;
  const int n = s.size();
  for (int x = 0; x < n; ++x) {
    const auto& sd = s.sorted_dist(x);
    std::vector<double> radii;
    radii.reserve(2 * n);
    for (int k = 1; k < n; ++k) {
      radii.push_back(sd[k]);
      radii.push_back(0.5 * sd[k]);
    }
    for (double r : radii) {
      double ratio = s.ball_mass(x, 2.0 * r) / s.ball_mass(x, r);
      if (ratio > rep.constant) {
        rep.constant = ratio;
        rep.center = x;
        rep.radius = r;
      }
    }
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      rep.lambda_ratio = std::max(rep.lambda_ratio, s.lambda(x, y) / s.lambda(y, x));
    }
  return rep;
}

PointSpace load_space_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open space file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("space file parse error: ") + e.what());
  }
  std::string kind = j.value("kind", std::string("matrix-file"));
  auto read_weights = [&](int n) {
    RVec mu = RVec::Constant(n, 1.0);
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      if (static_cast<int>(w.size()) != n) throw InvalidArgument("weights length mismatch");
      for (int i = 0; i < n; ++i) mu[i] = w[i].get<double>();
    }
    return mu;
  };
  if (j.contains("points")) {
    const auto& P = j["points"];
    const int n = static_cast<int>(P.size());
    if (n == 0) throw InvalidArgument("empty point list");
    const int dim = P[0].is_array() ? static_cast<int>(P[0].size()) : 1;
    RMat c(n, dim);
    for (int i = 0; i < n; ++i) {
      if (P[i].is_array()) {
        if (static_cast<int>(P[i].size()) != dim) throw InvalidArgument("ragged point list");
        for (int k = 0; k < dim; ++k) c(i, k) = P[i][k].get<double>();
      } else {
        c(i, 0) = P[i].get<double>();
      }
    }
    return from_points(c, read_weights(n), kind);
  }
  if (j.contains("distance_matrix")) {
    const auto& D = j["distance_matrix"];
    const int n = static_cast<int>(D.size());
    RMat d(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(D[i].size()) != n) throw InvalidArgument("distance matrix must be square");
      for (int k = 0; k < n; ++k) d(i, k) = D[i][k].get<double>();
    }
    return from_distance_matrix(d, read_weights(n), kind);
  }
  if (j.contains("edges")) {
    const int n = j.at("n").get<int>();
    std::vector<std::array<double, 3>> edges;
    for (const auto& e : j["edges"]) edges.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    return from_edges(n, edges, read_weights(n), kind);
  }
  throw InvalidArgument("space file needs points, distance_matrix or edges");
}

void save_space_json(const PointSpace& s, const std::string& path) {
  nlohmann::json j;
  j["kind"] = s.kind();
  const int n = s.size();
  if (s.coords().size() > 0) {
    auto P = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < s.dim(); ++k) row.push_back(s.coords()(i, k));
      P.push_back(row);
    }
    j["points"] = P;
  } else {
    auto D = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < n; ++k) row.push_back(s.rho(i, k));
      D.push_back(row);
    }
    j["distance_matrix"] = D;
  }
  auto w = nlohmann::json::array();
  for (int i = 0; i < n; ++i) w.push_back(s.weight(i));
  j["weights"] = w;
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write space file: " + path);
  out << j.dump(1) << '\n';
}

}  // namespace ltb
