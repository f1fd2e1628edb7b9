#pragma once

#include "krylov/gmres.hpp"
#include "krylov/precond.hpp"
#include "krylov/sparse.hpp"
#include "krylov/types.hpp"

namespace krylov {

/// Recycle triplet for the preconditioned base operator
/// A_p = (A + sigma_1 I) M^{-1}: C = A_p U has orthonormal columns and
/// Zu = M^{-1} U carries the solution-space image of U, so solution
/// corrections from this space live in range(Zu) and residual corrections
/// in range(C + sigma Zu).
struct RecycleSpace {
  DenseMatrix U;
  DenseMatrix C;
  DenseMatrix Zu;

  Index k() const { return U.cols(); }
  bool empty() const { return U.cols() == 0; }
  static RecycleSpace empty_space(Index n) {
    return {DenseMatrix(n, 0), DenseMatrix(n, 0), DenseMatrix(n, 0)};
  }
};

/// Arnoldi data of one recycled cycle plus the coupling blocks:
/// B = C^H A_p V_steps and G = [[I_k, B], [0, H]] satisfying
/// A_p [U V_steps] = [C V_{steps+1}] G.
struct AugmentedArnoldiData : ArnoldiData {
  DenseMatrix B;
  DenseMatrix G;
};

DenseMatrix assemble_augmented_relation(const DenseMatrix& B,
                                        const DenseMatrix& H);

struct AugCycleOutcome {
  Vector x;
  Vector r;
  AugmentedArnoldiData data;
  long matvecs = 0;
  double resnorm = 0.0;
  bool converged = false;
  bool happy_breakdown = false;
};

/// One cycle of GMRES on the projected operator (I - C C^H) A_p with the
/// optimal recycle-space correction folded into the solution update.
/// Requires C^H r0 = 0 (callers project first).
AugCycleOutcome rgmres_cycle(const SparseOperator& op, Shift base_shift,
                             const Preconditioner& p, const Vector& b,
                             const Vector& x0, const Vector& r0,
                             const RecycleSpace& rspace, Index m,
                             double abs_tol, OpCounters& counters);

/// Minimum-residual projection of the base residual against range(C):
/// x0 = x + Zu (C^H r), r0 = r - C (C^H r), leaving C^H r0 = 0.
std::pair<Vector, Vector> initial_projection(const RecycleSpace& rspace,
                                             const Vector& x_prev,
                                             const Vector& r_prev);

struct SpaceUpdateResult {
  RecycleSpace space;
  bool updated = false;  // false: eigensolver failure, previous space kept
};

/// Harmonic-Ritz recycle-space refresh: extracts the k smallest-|theta|
/// harmonic Ritz vectors of A_p over range([U V_steps]) from the reduced
/// pencil (G^H G, G^H W), forms the new triplet entirely by coordinate
/// transforms of stored bases (no operator or preconditioner applications)
/// and re-orthonormalizes C by QR, applying R^{-1} to U and Zu.
SpaceUpdateResult harmonic_ritz_update(const AugmentedArnoldiData& data,
                                       const RecycleSpace& old_space,
                                       Index k_target);

/// Re-targets the triplet from base shift sigma to sigma + delta with zero
/// operator applications: C <- qr(C + delta Zu), U and Zu rescaled.
RecycleSpace rebase_shift(const RecycleSpace& rspace, Complex delta);

/// Rebuilds C = A_p U (k operator + k preconditioner applications, counted
/// in `counters`) when a recycle space crosses to a different operator.
RecycleSpace rebuild_for_operator(const SparseOperator& op, Shift base_shift,
                                  const Preconditioner& p, const DenseMatrix& U,
                                  OpCounters& counters);

}  // namespace krylov
