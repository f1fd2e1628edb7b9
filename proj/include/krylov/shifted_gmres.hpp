#pragma once

#include <vector>

#include "krylov/gmres.hpp"
#include "krylov/precond.hpp"
#include "krylov/report.hpp"
#include "krylov/sparse.hpp"

namespace krylov {

/// A family (A + sigma_l I) x_l = b sharing the base matrix and right-hand
/// side. Solvers maintain x, r and the converged flags.
struct ShiftedFamily {
  const SparseOperator& op;
  Vector b;
  std::vector<Shift> shifts;
  std::vector<Vector> x;
  std::vector<Vector> r;
  std::vector<char> converged;

  Index size() const { return static_cast<Index>(shifts.size()); }

  /// Validates dimensions, finite pairwise-distinct shifts (unless
  /// allow_duplicate_shifts, used by diagnostics) and installs zero initial
  /// guesses when none are given.
  static ShiftedFamily make(const SparseOperator& op, Vector b,
                            std::vector<Shift> shifts,
                            std::vector<Vector> x0 = {},
                            bool allow_duplicate_shifts = false);
};

/// Gram blocks of one cycle, computed once per cycle independently of the
/// number of shifts: HtH = H^H H, HtVZ = H^H (V^H Z), ZtZ = Z^H Z.
struct ProjectionCache {
  DenseMatrix HtH;
  DenseMatrix HtVZ;
  DenseMatrix ZtZ;
};

ProjectionCache build_projection_cache(const ArnoldiData& data);

/// N_m^sigma = H^H H + sigma H^H V^H Z + conj(sigma) (H^H V^H Z)^H
///             + |sigma|^2 Z^H Z. Hermitian by construction.
DenseMatrix assemble_N_sigma(const ProjectionCache& cache, Shift sigma);

struct ProjectionResult {
  Vector x;
  Vector r;
  bool applied = false;  // false: singular N or no-improvement guard
};

/// Seed projection of one shifted system's (x0, r0) onto the cycle's search
/// space: y = N^{-1} (V H + sigma Z)^H r0, x = x0 + Z y,
/// r = r0 - (V H + sigma Z) y. sigma_rel is the shift relative to the
/// cycle's base operator. Never increases ||r||.
ProjectionResult project_shift(const ArnoldiData& data,
                               const ProjectionCache& cache, Shift sigma_rel,
                               const Vector& x0, const Vector& r0);

/// Block-shaped variant covering several shifted systems against the same
/// cycle data; evaluates each column with expressions identical to
/// project_shift, so results match the one-shift path bitwise regardless of
/// the parallel flag.
std::vector<ProjectionResult> project_shift_batch(
    const ArnoldiData& data, const ProjectionCache& cache,
    const std::vector<Shift>& sigmas_rel, const std::vector<const Vector*>& x0,
    const std::vector<const Vector*>& r0, bool parallel = false);

/// Restarted right-preconditioned GMRES on the base system with one seed
/// projection per cycle for every remaining unconverged shift, then
/// recursion (as iteration) over the unconverged shifts. All systems end at
/// relative residual <= opts.eps or the per-system cycle budget is
/// exhausted (flagged in the report, not an error).
SolveReport sgmres_solve(ShiftedFamily& family, const Preconditioner& p,
                         const SolveOptions& opts);

}  // namespace krylov
