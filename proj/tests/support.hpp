#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ltb/space.hpp"

namespace ltbtest {

struct NamedSpace {
  std::string name;
  ltb::PointSpace space;
  bool uniform = false;
};

// 20 seeded spaces: the six base spaces plus weight-jittered copies
inline std::vector<NamedSpace> seeded_spaces() {
  struct Base {
    std::string kind;
    ltb::GenParams p;
    bool uniform;
    int copies;
  };
  std::vector<Base> bases;
  ltb::GenParams p;
  p.n = 64;
  bases.push_back({"uniform-line", p, true, 4});
  p.n = 256;
  bases.push_back({"uniform-line", p, true, 4});
  ltb::GenParams g;
  g.nx = g.ny = 16;
  bases.push_back({"uniform-grid-2d", g, true, 3});
  bases.push_back({"line-with-gap", ltb::GenParams{}, false, 3});
  bases.push_back({"triangle-edges", ltb::GenParams{}, false, 3});
  ltb::GenParams c;
  c.n = 128;
  bases.push_back({"circle", c, false, 3});
  std::vector<NamedSpace> out;
  for (const auto& b : bases)
    for (int k = 0; k < b.copies; ++k) {
      ltb::GenParams q = b.p;
      q.seed = 100 + k;
      q.jitter = k == 0 ? 0.0 : 0.25;
      std::string name = b.kind + (b.kind == "uniform-line" ? "/n" + std::to_string(q.n) : "") + "/s" + std::to_string(k);
      out.push_back({name, ltb::generate(b.kind, q), b.uniform && k == 0});
    }
  return out;
}

inline ltb::PointSpace line(int n) {
  ltb::GenParams p;
  p.n = n;
  return ltb::generate("uniform-line", p);
}

inline ltb::CVec random_vec(int n, std::uint64_t seed, bool complex_values = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ltb::CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = complex_values ? ltb::cplx(u(rng), u(rng)) : ltb::cplx(u(rng), 0.0);
  return v;
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace ltbtest
