#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ltb/io.hpp"

using namespace ltb;

TEST_CASE("csv formatting") {
  CsvWriter w({"a", "b"});
  w.row(std::vector<double>{0.5, 1.0});
  w.row(std::vector<double>{0.1, -2.0});
  CHECK(w.str() == "a,b\n0.5,1\n0.10000000000000001,-2\n");
  CHECK(w.rows() == 2);
  CHECK_THROWS(w.row(std::vector<double>{1.0}));
}

TEST_CASE("json numbers") {
  CHECK(number(1.5).get<double>() == 1.5);
  CHECK(number(std::nan("")).is_string());
  CHECK(number(INFINITY).is_string());
  Json z = complex_json(cplx(1.0, -2.0));
  CHECK(z.dump() == "[1.0,-2.0]");
}

TEST_CASE("space and matrix round trips") {
  auto dir = std::filesystem::temp_directory_path() / "ltb_io_test";
  std::filesystem::create_directories(dir);
  GenParams p;
  p.n = 12;
  p.jitter = 0.2;
  p.seed = 3;
  PointSpace s = generate("uniform-line", p);
  save_space_json(s, (dir / "s.json").string());
  PointSpace r = load_space_json((dir / "s.json").string());
  CHECK((r.dist() - s.dist()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.mu() - s.mu()).cwiseAbs().maxCoeff() == 0.0);

  RMat m(2, 3);
  m << 1.0, 0.1, -3.25, 1e-300, 2.0, 7.0;
  save_matrix_csv(m, (dir / "m.csv").string());
  CHECK((load_matrix_csv((dir / "m.csv").string()) - m).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove_all(dir);
}
