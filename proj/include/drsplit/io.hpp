#pragma once

// File formats: problem/solution JSON and bit-stable CSV.
//
// Problem JSON:  {"P": [[...]], "q": [...], "S": [[...]], "t": [...], "L": [[...]]}
// Solution JSON: {"x": [...], "y": [...], "rate_bound": r, "iters": n, "kkt": v}
// CSV: '.' decimal point, 17 significant digits, LF line endings, header always present.

#include "drsplit/engine.hpp"
#include "drsplit/primal_dual.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace drs::io {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Vector vector_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) {
    throw ParseError("field '" + field + "' must be an array of numbers");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError("field '" + field + "' must contain only numbers");
    }
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("field '" + field + "' must be a non-empty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) {
    throw ParseError("field '" + field + "' must contain non-empty rows");
  }
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError("field '" + field + "' has ragged rows");
    }
    m.row(static_cast<Index>(r)) = vector_from_json(j[r], field).transpose();
  }
  return m;
}

inline nlohmann::json to_json(const Vector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    j.push_back(v[i]);
  }
  return j;
}

inline nlohmann::json to_json(const Matrix& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    j.push_back(to_json(Vector(m.row(r).transpose())));
  }
  return j;
}

inline CompositeProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ParseError("problem must be a JSON object");
  }
  for (const char* key : {"P", "q", "S", "t", "L"}) {
    if (!j.contains(key)) {
      throw ParseError(std::string("problem is missing field '") + key + "'");
    }
  }
  return {matrix_from_json(j.at("P"), "P"), vector_from_json(j.at("q"), "q"),
          matrix_from_json(j.at("S"), "S"), vector_from_json(j.at("t"), "t"),
          matrix_from_json(j.at("L"), "L")};
}

inline nlohmann::json problem_to_json(const CompositeProblem& p) {
  return {{"P", to_json(p.P())}, {"q", to_json(p.q())}, {"S", to_json(p.S())},
          {"t", to_json(p.t())}, {"L", to_json(p.L())}};
}

inline nlohmann::json solution_to_json(const PDSolution& s) {
  return {{"x", to_json(s.x_star)},
          {"y", to_json(s.y_star)},
          {"rate_bound", s.rate_bound},
          {"iters", s.trace.iterations_used},
          {"kkt", s.kkt_residual}};
}

/// Columns iter, step_norm, shadow_residual; one row per step taken.
inline void write_trace_csv(std::ostream& os, const IterationTrace& tr) {
  os << "iter,step_norm,shadow_residual\n";
  for (std::size_t i = 0; i < tr.step_norms.size(); ++i) {
    os << (i + 1) << ',' << format_double(tr.step_norms[i]) << ','
       << format_double(tr.shadow_residuals[i]) << '\n';
  }
}

}  // namespace drs::io
