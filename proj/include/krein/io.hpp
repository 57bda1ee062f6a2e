#pragma once

// JSON problem/report serialization and CSV curve emission. Complex numbers
// travel as [re, im] pairs, matrices as row-major nested arrays; files carry a
// "schema" version tag. Infinite diagnostics are flagged explicitly (JSON has
// no infinity literal) as the string "infinity".

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "krein/core.hpp"
#include "krein/family.hpp"
#include "krein/riccati.hpp"
#include "krein/semigroup.hpp"
#include "krein/transfer.hpp"
#include "krein/version.hpp"

namespace krein::io {

using Json = nlohmann::ordered_json;

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw KreinError(ErrorCode::parse_error, "complex value must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                               const std::string& name) {
  if (!j.is_array() || Eigen::Index(j.size()) != rows)
    throw KreinError(ErrorCode::parse_error, name + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || Eigen::Index(row.size()) != cols)
      throw KreinError(ErrorCode::parse_error,
                       name + ": expected " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[c]);
  }
  return m;
}

// +-infinity encoded as a string flag so reports stay valid JSON.
inline Json finite_or_flag(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "infinity" : "-infinity";
}

inline Json to_json(const std::vector<std::pair<double, double>>& table) {
  Json out = Json::array();
  for (auto& [key, value] : table) out.push_back(Json::array({key, finite_or_flag(value)}));
  return out;
}

// ---------------------------------------------------------------------------
// Problem files.

inline Json problem_to_json(const BlockOperator& a, const Json& metadata = Json::object()) {
  Json j;
  j["schema"] = problem_schema;
  j["n_plus"] = a.structure.n_plus;
  j["n_minus"] = a.structure.n_minus;
  j["A11"] = to_json(a.A11);
  j["A12"] = to_json(a.A12);
  j["A21"] = to_json(a.A21);
  j["A22"] = to_json(a.A22);
  if (!metadata.empty()) j["metadata"] = metadata;
  return j;
}

inline BlockOperator problem_from_json(const Json& j) {
  if (!j.is_object()) throw KreinError(ErrorCode::parse_error, "problem: expected a JSON object");
  if (!j.contains("schema") || j["schema"] != problem_schema)
    throw KreinError(ErrorCode::parse_error,
                     std::string("problem: missing or unsupported schema (expected ") +
                         problem_schema + ")");
  for (const char* key : {"n_plus", "n_minus", "A11", "A12", "A21", "A22"})
    if (!j.contains(key))
      throw KreinError(ErrorCode::parse_error, std::string("problem: missing field ") + key);
  if (!j["n_plus"].is_number_integer() || !j["n_minus"].is_number_integer())
    throw KreinError(ErrorCode::parse_error, "problem: n_plus/n_minus must be integers");
  int np = j["n_plus"].get<int>(), nm = j["n_minus"].get<int>();
  if (np < 0 || nm < 0 || np + nm < 1)
    throw KreinError(ErrorCode::parse_error, "problem: invalid dimensions");
  KreinStructure s{np, nm};
  return BlockOperator(s, matrix_from_json(j["A11"], np, np, "A11"),
                       matrix_from_json(j["A12"], np, nm, "A12"),
                       matrix_from_json(j["A21"], nm, np, "A21"),
                       matrix_from_json(j["A22"], nm, nm, "A22"));
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KreinError(ErrorCode::io_error, "cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw KreinError(ErrorCode::parse_error, path + ": " + e.what());
  }
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);  // fixed newline policy
  if (!out) throw KreinError(ErrorCode::io_error, "cannot open file for writing: " + path);
  out << text;
  if (!out) throw KreinError(ErrorCode::io_error, "write failed: " + path);
}

inline void write_json(const std::string& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline BlockOperator read_problem(const std::string& path) {
  return problem_from_json(read_json(path));
}

inline void write_problem(const std::string& path, const BlockOperator& a,
                          const Json& metadata = Json::object()) {
  write_json(path, problem_to_json(a, metadata));
}

// ---------------------------------------------------------------------------
// Report sections.

inline Json to_json(const DissipativityVerdict& v) {
  Json j;
  j["j_dissipative"] = v.j_dissipative;
  j["uniform_margin"] = v.uniform_margin;
  j["max_real_numeric"] = v.max_real_numeric;
  j["tolerance"] = v.tolerance;
  return j;
}

inline Json to_json(const RiccatiResiduals& r) {
  Json j;
  j["classical"] = r.classical;
  j["modified_ric1"] = r.modified_ric1;
  j["modified_ric2"] = r.modified_ric2;
  j["invariance_defect"] = r.invariance_defect;
  return j;
}

inline Json to_json(const SemigroupReport& r) {
  Json j;
  j["classification"] = to_string(r.classification);
  j["numerical_abscissa"] = r.numerical_abscissa;
  if (r.sector_angle)
    j["sector_angle"] = *r.sector_angle;
  else
    j["sector_angle"] = nullptr;
  j["gearhart"] = to_json(r.gearhart);
  j["holomorphic_constant"] = finite_or_flag(r.holomorphic_constant);
  j["quasi_holomorphic"] = to_json(r.quasi_holomorphic);
  j["fmp_omega"] = r.fmp_omega;
  j["fmp_constant"] = finite_or_flag(r.fmp_constant);
  j["gomilko"] = to_json(r.gomilko);
  j["exp_type_spectral"] = r.exp_type_spectral;
  j["exp_type_gearhart"] = r.exp_type_gearhart;
  j["exp_type_curve"] = r.exp_type_curve;
  return j;
}

inline Json to_json(const SvDecayReport& r) {
  Json j;
  Json sv = Json::array();
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) sv.push_back(r.singular_values(i));
  j["singular_values"] = std::move(sv);
  j["numerical_rank"] = r.numerical_rank;
  j["decay_exponent"] = finite_or_flag(r.decay_exponent);
  return j;
}

inline Json to_json(const Thm31Verdict& v) {
  Json j;
  j["pass"] = v.pass;
  j["cond_i"] = v.cond_i;
  j["cond_ii"] = v.cond_ii;
  j["cond_iii"] = v.cond_iii;
  j["decay_exponent"] = finite_or_flag(v.decay_exponent);
  Json gd = Json::array();
  for (const auto& d : v.g_decay) gd.push_back(to_json(d));
  j["g_decay"] = std::move(gd);
  Json rs = Json::array();
  for (double r : v.r_sup) rs.push_back(finite_or_flag(r));
  j["r_sup"] = std::move(rs);
  j["g_envelope_first"] = v.g_first;
  j["g_envelope_last"] = v.g_last;
  j["a22_quasi_table"] = to_json(v.a22_quasi_table);
  Json pairs = Json::array();
  for (const PairNorms& p : v.pair)
    pairs.push_back(Json{{"alpha", p.alpha}, {"left", p.left}, {"right", p.right}});
  j["pair_norms"] = std::move(pairs);
  j["uniform_margin"] = finite_or_flag(v.uniform_margin);
  j["predicted"] = v.predicted;
  return j;
}

inline Json to_json(const Thm32Verdict& v) {
  Json j;
  j["pass"] = v.pass;
  j["cond_i"] = v.cond_i;
  j["cond_ii"] = v.cond_ii;
  j["s_quasi"] = v.s_quasi;
  j["s_table"] = to_json(v.s_table);
  j["a11_quasi"] = v.a11_quasi;
  j["a11_table"] = to_json(v.a11_table);
  j["a21_resolvent_norm"] = finite_or_flag(v.a21_resolvent_norm);
  j["a21_bounded"] = v.a21_bounded;
  j["x_quasi"] = v.x_quasi;
  j["x_table"] = to_json(v.x_table);
  return j;
}

inline Json to_json(const GalerkinReport& rep) {
  Json j;
  j["mu"] = to_json(rep.mu);
  Json rows = Json::array();
  for (const GalerkinRow& r : rep.rows) {
    Json row;
    row["m"] = r.m;
    row["solved"] = r.solved;
    if (!r.solved) row["error"] = r.error;
    row["k_norm"] = r.k_norm;
    row["k_diff"] = r.k_diff;
    row["surrogate"] = r.surrogate;
    row["g_norm"] = r.g_norm;
    row["r_sup"] = r.r_sup;
    row["pair_left"] = r.pair_left;
    row["pair_right"] = r.pair_right;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["trends"] = Json{{"k_diff", to_string(rep.k_trend)},
                     {"surrogate", to_string(rep.surrogate_trend)},
                     {"g_norm", to_string(rep.g_trend)},
                     {"r_sup", to_string(rep.r_trend)},
                     {"pair", to_string(rep.pair_trend)}};
  if (rep.rows.size() < 2) j["note"] = "insufficient points";
  Json env = Json::array();
  for (const EnvelopeSample& s : rep.final_envelope.samples) {
    Json e;
    e["mu"] = to_json(s.mu);
    e["admissible"] = s.admissible;
    e["g_norm"] = s.g_norm;
    e["f_norm"] = s.f_norm;
    e["r_norm"] = s.r_norm;
    e["s_norm"] = s.s_norm;
    env.push_back(std::move(e));
  }
  j["final_envelope"] = std::move(env);
  return j;
}

// ---------------------------------------------------------------------------
// CSV emission (fixed %.17g formatting keeps byte determinism).

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_number(row[i]);
    out << "\n";
  }
  write_text(path, out.str());
}

}  // namespace krein::io
