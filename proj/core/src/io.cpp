#include "ltb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ltb {

std::string format_double(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json complex_json(cplx z) { return Json::array({number(z.real()), number(z.imag())}); }

Json to_json(const DyadicTree& t) {
  Json j;
  j["schema"] = kReportSchema;
  j["delta"] = t.delta;
  j["scale"] = t.scale;
  j["depth"] = t.depth();
  j["complete"] = t.complete;
  j["C1"] = number(t.C1);
  j["a0"] = number(t.a0);
  j["CX"] = number(t.CX);
  Json cubes = Json::array();
  for (const Cube& c : t.cubes) {
    Json q;
    q["id"] = c.id;
    q["generation"] = c.gen;
    q["center"] = c.center;
    q["parent"] = c.parent;
    q["members"] = c.members;
    q["children"] = c.children;
    q["neighbors"] = c.neighbors;
    q["mass"] = c.mass;
    cubes.push_back(std::move(q));
  }
  j["cubes"] = std::move(cubes);
  return j;
}

Json to_json(const HaarSystem& sys) {
  Json j;
  j["schema"] = kReportSchema;
  Json arr = Json::array();
  for (const WaveletEntry& e : sys.entries) {
    Json w;
    w["cube"] = e.cube;
    w["children"] = e.children;
    w["bmean"] = complex_json(e.bmean);
    w["accretivity"] = number(e.accretivity);
    w["frame"] = {{"tag", "5.1(6)"}, {"lower", number(e.frame_lower)}, {"upper", number(e.frame_upper)}};
    auto table = [](const CMat& m) {
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    w["phi"] = table(e.phi);
    w["phit"] = table(e.phit);
    arr.push_back(std::move(w));
  }
  j["wavelets"] = std::move(arr);
  return j;
}

Json to_json(const StoppingDecomposition& d) {
  Json j;
  j["schema"] = kReportSchema;
  j["root"] = d.root;
  j["side"] = d.side;
  j["delta_stop"] = d.delta_stop;
  j["c_stop"] = number(d.c_stop);
  j["maximal_variant"] = d.maximal_variant;
  j["degenerate"] = d.degenerate;
  j["eps"] = {{"tag", "5.2"}, {"value", number(d.eps)}};
  j["mean_bound"] = {{"tag", "5.3"}, {"retained", number(d.mean_bound_retained)}, {"tops", number(d.mean_bound_tops)}};
  j["tops"] = d.tops;
  j["omega"] = d.omega;
  j["buffer"] = d.buffer;
  Json cls = Json::array();
  for (std::size_t id = 0; id < d.cls.size(); ++id) cls.push_back(class_name(d.cls[id]));
  j["classes"] = std::move(cls);
  return j;
}

Json to_json(const BcrDecomposition& d) {
  Json j;
  j["schema"] = kReportSchema;
  j["exact"] = complex_json(d.exact);
  j["e0"] = complex_json(d.e0);
  auto four = [](const std::array<cplx, 4>& a) {
    Json r = Json::array();
    for (cplx z : a) r.push_back(complex_json(z));
    return r;
  };
  j["U"] = four(d.U);
  j["V"] = four(d.V);
  j["W"] = four(d.W);
  j["W_dual"] = four(d.W_dual);
  j["V1_split"] = {{"V11", complex_json(d.v_split.v11)},
                   {"V12", complex_json(d.v_split.v12)},
                   {"V13", complex_json(d.v_split.v13)},
                   {"beta_cancellation", number(d.v_split.beta_cancellation)},
                   {"beta_cubes", d.v_split.beta_cubes}};
  j["scale"] = number(d.scale);
  j["telescoping_residual"] = number(d.residual);
  j["w_duality"] = number(d.w_duality);
  j["w_dense_gap"] = number(d.w_dense_gap);
  j["mean_zero"] = number(d.mean_zero);
  j["residual_7.1"] = number(d.residual71);
  j["contributions"] = d.contributions.size();
  return j;
}

Json to_json(const AppendixBReport& r) {
  Json j = Json::array();
  for (int k = 0; k < 8; ++k)
    j.push_back({{"tag", "B." + std::to_string(k + 1)}, {"ratio", number(r.ratio[k])}, {"pairs", r.pairs[k]}});
  return j;
}

Json to_json(const DecayProfile& p) {
  Json j;
  j["x"] = p.x;
  Json r = Json::array();
  for (double v : p.ratio) r.push_back(number(v));
  j["ratio"] = std::move(r);
  j["C"] = number(p.fit.C);
  j["eta"] = number(p.fit.eta);
  j["residual"] = number(p.fit.residual);
  j["points"] = p.fit.points;
  j["configs"] = p.configs;
  j["pass"] = p.pass;
  j["witness"] = p.witness;
  return j;
}

Json to_json(const GeodesicProfile& g) {
  Json j;
  j["tag"] = "9.6";
  j["u"] = g.u;
  Json c = Json::array();
  for (double v : g.C) c.push_back(number(v));
  j["C"] = std::move(c);
  j["overall"] = number(g.overall);
  j["threshold"] = g.threshold;
  j["pass"] = g.pass;
  return j;
}

Json to_json(const NormEstimate& e) {
  return {{"value", number(e.value)}, {"lower_bound", number(e.lower_bound)}, {"iterations", e.iterations},
          {"converged", e.converged}, {"label", e.label}};
}

Json to_json(const HardyFamily& h) {
  Json j;
  j["tag"] = "3.8";
  j["nu"] = h.nu;
  j["radii"] = h.radii;
  Json v = Json::array();
  for (double x : h.per_radius) v.push_back(number(x));
  j["per_radius"] = std::move(v);
  j["max"] = number(h.max_value);
  j["spread"] = number(h.spread);
  j["skipped"] = h.skipped;
  return j;
}

Json to_json(const ImplicationReport& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["monotone_geodesic"] = to_json(r.geodesic);
  j["relative_annular"] = to_json(r.relative_annular);
  j["relative_layer"] = to_json(r.relative_layer);
  j["annular"] = to_json(r.annular);
  j["layer"] = to_json(r.layer);
  j["hardy"] = to_json(r.hardy);
  j["hardy_bounded"] = r.hardy_bounded;
  j["links"] = {{"geodesic_to_annular", r.link_geodesic_annular},
                {"annular_to_layer", r.link_annular_layer},
                {"layer_to_hardy", r.link_layer_hardy}};
  j["violations"] = r.violations;
  return j;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
  row(header);
  rows_ = 0;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return row(cells);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != cols_) throw InvalidArgument("csv row has the wrong width");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) buf_ += ',';
    buf_ += cells[k];
  }
  buf_ += '\n';
  ++rows_;
  return *this;
}

std::string CsvWriter::str() const { return buf_; }

void CsvWriter::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << buf_;
}

void save_matrix_csv(const RMat& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

RMat load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    if (!rows.empty() && r.size() != rows[0].size()) throw InvalidArgument(path + ": ragged matrix");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InvalidArgument(path + ": empty matrix");
  RMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

}  // namespace ltb
