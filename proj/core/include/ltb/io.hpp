#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltb/bcr.hpp"
#include "ltb/geometry.hpp"
#include "ltb/haar.hpp"
#include "ltb/stopping.hpp"

namespace ltb {

inline constexpr int kReportSchema = 1;

using Json = nlohmann::ordered_json;

Json to_json(const DyadicTree& t);
Json to_json(const HaarSystem& sys);
Json to_json(const StoppingDecomposition& d);
Json to_json(const BcrDecomposition& d);
Json to_json(const AppendixBReport& r);
Json to_json(const DecayProfile& p);
Json to_json(const GeodesicProfile& g);
Json to_json(const HardyFamily& h);
Json to_json(const ImplicationReport& r);
Json to_json(const NormEstimate& e);
Json complex_json(cplx z);

// NaN and infinities become strings
Json number(double v);

void write_json(const Json& j, const std::string& path);
Json read_json(const std::string& path);

// comma separated, doubles printed with %.17g
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<double>& values);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::string& path) const;
  std::size_t rows() const { return rows_; }

 private:
  std::string buf_;
  std::size_t cols_;
  std::size_t rows_ = 0;
};

std::string format_double(double v);

// dense operator matrix as CSV, one row per target point
void save_matrix_csv(const RMat& m, const std::string& path);
RMat load_matrix_csv(const std::string& path);

}  // namespace ltb
