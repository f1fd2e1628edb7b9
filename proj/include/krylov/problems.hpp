#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krylov/sparse.hpp"
#include "krylov/types.hpp"

namespace krylov {

/// Matrix Market coordinate reader (real or complex, general). 1-based
/// indices are converted; comment lines are skipped; malformed input raises
/// ParseError with the offending line number.
SparseOperator read_matrix_market(const std::string& path);

/// Coordinate complex general writer (round-trip counterpart of the reader).
void write_matrix_market(const SparseOperator& op, const std::string& path);

/// Base-matrix transform for lattice operator files:
/// A = (1/kappa_c + 1e-3) I - D.
SparseOperator qcd_base_matrix(const SparseOperator& D, double kappa_c);

/// Right-hand-side sequence: b_1 is the all-ones vector, each increment is
/// a seeded random direction of 2-norm 0.1 (complex Gaussian by default).
std::vector<Vector> rhs_sequence(Index n, Index count, std::uint64_t seed,
                                 bool complex_increments = true);

/// 2-D convection-diffusion 5-point stencil of dimension nx^2; convection
/// makes it non-Hermitian and `rotation` multiplies all entries by
/// exp(i*rotation).
SparseOperator synthetic_convdiff(Index nx, double peclet, double rotation);

struct ProblemInstance {
  SparseOperator op;
  Vector b;
  std::vector<Shift> shifts;
  std::string label;
};

ProblemInstance make_problem(SparseOperator op, Vector b,
                             std::vector<Shift> shifts, std::string label);

/// Per-matrix metadata sidecar: name, kappa_c and expected norm intervals.
struct FixtureMeta {
  std::string name;
  double kappa_c = 0.0;  // 0 when absent
  double norm1_lo = 0.0, norm1_hi = 0.0;
  double norm2_lo = 0.0, norm2_hi = 0.0;
};

FixtureMeta read_fixture_meta(const std::string& path);
void write_fixture_meta(const FixtureMeta& meta, const std::string& path);

}  // namespace krylov
