#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace krylov {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Scalar shift sigma of a shifted operator A + sigma*I.
struct Shift {
  Complex value{0.0, 0.0};
};

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Operator / preconditioner application counters. Cycles increment these
/// once per application on an n-length vector; projections never touch them.
struct OpCounters {
  long matvecs = 0;
  long precond_applies = 0;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerically singular dense system; carries a rough condition estimate so
/// callers can distinguish a degenerate search space from a bug.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double cond)
      : std::runtime_error(what), condition_estimate(cond) {}
  double condition_estimate = 0.0;
};

class ZeroPivotError : public std::runtime_error {
 public:
  ZeroPivotError(const std::string& what, Index row)
      : std::runtime_error(what), row(row) {}
  Index row = -1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line(line) {}
  long line = 0;
};

}  // namespace krylov
