// JSON schema shared by the CLI and file formats:
//   complex  = [re, im]
//   matrix   = row-major nested arrays of complex
//   measure  = {"domain": "circle"|"line", "atoms": [{"point": complex|real,
//               "weight": matrix}]}
//   inner fn = {"constant": complex, "zeros": [complex]}
#pragma once

#include <fstream>

#include <json.hpp>

#include "livsic/herglotz.hpp"

namespace livsic::io {

using Json = nlohmann::ordered_json;

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error("json: complex number must be [re, im], got " + j.dump());
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error("json: matrix must be a nested array");
  const Eigen::Index rows = Eigen::Index(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw Error("json: matrix rows must be arrays of complex");
  const Eigen::Index cols = Eigen::Index(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (Eigen::Index(j[std::size_t(r)].size()) != cols)
      throw Error("json: ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[std::size_t(r)][std::size_t(c)]);
  }
  return m;
}

inline Json measure_to_json(const AtomicMatrixMeasure& sigma) {
  Json out;
  out["domain"] = sigma.domain == MeasureDomain::circle ? "circle" : "line";
  Json atoms = Json::array();
  for (const auto& atom : sigma.atoms) {
    Json a;
    if (sigma.domain == MeasureDomain::line)
      a["point"] = atom.point.real();
    else
      a["point"] = complex_to_json(atom.point);
    a["weight"] = matrix_to_json(atom.weight);
    atoms.push_back(a);
  }
  out["atoms"] = atoms;
  return out;
}

inline AtomicMatrixMeasure measure_from_json(const Json& j) {
  AtomicMatrixMeasure sigma;
  if (!j.contains("domain") || !j.contains("atoms"))
    throw Error("json: measure requires 'domain' and 'atoms' fields");
  std::string domain = j["domain"].get<std::string>();
  if (domain == "circle") sigma.domain = MeasureDomain::circle;
  else if (domain == "line") sigma.domain = MeasureDomain::line;
  else throw Error("json: measure domain must be 'circle' or 'line'");
  for (const auto& a : j["atoms"]) {
    MeasureAtom atom;
    atom.point = complex_from_json(a.at("point"));
    atom.weight = matrix_from_json(a.at("weight"));
    sigma.atoms.push_back(atom);
  }
  sigma.dim = sigma.atoms.empty() ? 1 : sigma.atoms[0].weight.rows();
  sigma.validate(1e-7);
  return sigma;
}

inline Json inner_to_json(const ScalarInner& f) {
  Json out;
  out["constant"] = complex_to_json(f.constant);
  Json zeros = Json::array();
  for (Complex z : f.zeros) zeros.push_back(complex_to_json(z));
  out["zeros"] = zeros;
  return out;
}

inline ScalarInner inner_from_json(const Json& j) {
  if (!j.contains("zeros"))
    throw Error("json: inner function requires a 'zeros' field");
  std::vector<Complex> zeros;
  for (const auto& z : j["zeros"]) zeros.push_back(complex_from_json(z));
  ScalarInner f = ScalarInner::canonical(std::move(zeros));
  if (j.contains("constant")) {
    Complex c = complex_from_json(j["constant"]);
    if (std::abs(std::abs(c) - 1.0) > 1e-7)
      throw Error("json: inner function constant must be unimodular");
    f.constant = c / std::abs(c);
  }
  for (Complex z : f.zeros)
    if (z.imag() <= 0)
      throw Error("json: inner function zeros must lie in the upper half-plane");
  return f;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("parse error in " + path + ": " + e.what());
  }
}

inline std::vector<Complex> grid_from_json(const Json& j) {
  std::vector<Complex> grid;
  for (const auto& z : j) grid.push_back(complex_from_json(z));
  return grid;
}

}  // namespace livsic::io
