#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace drs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a formula is evaluated outside the parameter region where it is defined.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised for shape or dimension disagreements between arguments.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operator's claimed property is refuted by graph sampling.
class ClaimRefuted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) {
    throw DomainError(what);
  }
}

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) {
    throw DimensionError(what);
  }
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

}  // namespace drs
