#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "symflow/symplectic.hpp"

namespace symflow {

using Json = nlohmann::json;

inline Error schema_error(const std::string& where, const std::string& what) {
  return Error(ErrorKind::SchemaError, where + ": " + what);
}

// Rejects keys outside the allowed set.
inline void require_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw schema_error(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw schema_error(where, "unknown field '" + it.key() + "'");
}

inline const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw schema_error(where, "missing field '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw schema_error(where, "expected a number");
  return j.get<double>();
}

inline double number_or(const Json& obj, const std::string& key, double dflt, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : number(*it, where + "." + key);
}

inline cplx parse_entry(const Json& e, const std::string& where) {
  if (e.is_number()) return cplx(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return cplx(e[0].get<double>(), e[1].get<double>());
  throw schema_error(where, "matrix entries are numbers or [re, im] pairs");
}

// A matrix is a list of equally long rows.
inline Mat parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw schema_error(where, "a matrix is a list of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw schema_error(where, "rows must be non-empty lists");
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw schema_error(where, "row " + std::to_string(r) + " has length " +
                                    std::to_string(j[r].is_array() ? j[r].size() : 0) + ", expected " +
                                    std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_entry(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline Json entry_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

inline Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(entry_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

template <class Range>
inline Json list_json(const Range& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

// "standard:n" or a gamma matrix.
inline SpacePtr parse_space(const Json& j, const std::string& where, double tol) {
  if (j.is_string()) {
    const std::string v = j.get<std::string>();
    const std::string prefix = "standard:";
    if (v.rfind(prefix, 0) != 0) throw schema_error(where, "expected \"standard:n\" or a gamma matrix");
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(v.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() - prefix.size() || n < 1)
      throw schema_error(where, "'" + v + "' does not name a positive dimension");
    return standard_space(n);
  }
  return space_from_gamma(parse_matrix(j, where), tol);
}

inline bool same_space(const SymplecticSpace& a, const SymplecticSpace& b) {
  return a.gamma.rows() == b.gamma.rows() && max_abs(a.gamma - b.gamma) < 1e-12;
}

// {"frame": M} with an optional "space", or {"phi": U}. A "space" given here
// must agree with the ambient one.
inline Lagrangian parse_lagrangian(const Json& j, const SpacePtr& s, const std::string& where, double tol) {
  require_keys(j, where, {"frame", "phi", "space"});
  if (j.contains("frame") == j.contains("phi")) throw schema_error(where, "give exactly one of 'frame' and 'phi'");
  if (j.contains("space") && !same_space(*parse_space(j["space"], where + ".space", tol), *s))
    throw Error(ErrorKind::DimensionMismatch, where + ": Lagrangian lives in a different space");
  if (j.contains("phi")) return lagrangian_from_phi(s, parse_matrix(j["phi"], where + ".phi"), std::max(tol, 1e-9));
  return lagrangian_from_frame(s, parse_matrix(j["frame"], where + ".frame"), std::max(tol, 1e-9));
}

inline Json lagrangian_json(const Lagrangian& l) {
  return Json{{"frame", matrix_json(l.frame)}, {"phi", matrix_json(l.phi)}};
}

}  // namespace symflow
