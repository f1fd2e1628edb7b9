#pragma once

#include <utility>
#include <vector>

#include "krylov/rgmres.hpp"
#include "krylov/shifted_gmres.hpp"

namespace krylov {

/// Shift-independent Gram blocks of one recycled cycle. cross1 stacks
/// [[C^H Zu, C^H Z], [V^H Zu, V^H Z]]; Gt_cross = G^H cross1 is kept so the
/// per-shift assembly is three scaled additions, as in the plain case.
struct AugmentedProjectionCache {
  DenseMatrix G;
  DenseMatrix GtG;
  DenseMatrix cross1;
  DenseMatrix zgram;
  DenseMatrix Gt_cross;
};

AugmentedProjectionCache build_aug_projection_cache(
    const AugmentedArnoldiData& data, const RecycleSpace& rspace);

/// N_m^sigma over the augmented space:
/// G^H G + |sigma|^2 zgram + sigma G^H cross1 + conj(sigma) cross1^H G.
DenseMatrix assemble_N_sigma_aug(const AugmentedProjectionCache& cache,
                                 Shift sigma);

/// Right-hand sides for the augmented projection; the simplified form
/// assumes the initial-projection orthogonality (C + sigma Zu)^H r0 = 0,
/// which zeroes the leading k block.
Vector aug_projection_rhs_full(const AugmentedArnoldiData& data,
                               const RecycleSpace& rspace,
                               const AugmentedProjectionCache& cache,
                               Shift sigma_rel, const Vector& r0);
Vector aug_projection_rhs_simplified(const AugmentedArnoldiData& data,
                                     const RecycleSpace& rspace,
                                     Shift sigma_rel, const Vector& r0);

/// Per-cycle seed projection over the augmented space:
/// y = N^{-1} rhs, x = x0 + [Zu Z] y,
/// r = r0 - ([C V] G + sigma [Zu Z]) y. Never increases ||r||.
ProjectionResult project_shift_aug(const AugmentedArnoldiData& data,
                                   const RecycleSpace& rspace,
                                   const AugmentedProjectionCache& cache,
                                   Shift sigma_rel, const Vector& x0,
                                   const Vector& r0);

std::vector<ProjectionResult> project_shift_aug_batch(
    const AugmentedArnoldiData& data, const RecycleSpace& rspace,
    const AugmentedProjectionCache& cache, const std::vector<Shift>& sigmas_rel,
    const std::vector<const Vector*>& x0, const std::vector<const Vector*>& r0,
    bool parallel = false);

/// One-time blocks for the initial projections against the recycle space.
struct RecycleProjectionCache {
  DenseMatrix CtZu;
  DenseMatrix ZutZu;
};

RecycleProjectionCache build_recycle_projection_cache(const RecycleSpace& rspace);

/// Initial minimum-residual projection of a shifted system against the
/// recycle space: N = I + sigma C^H Zu + conj(sigma) Zu^H C
/// + |sigma|^2 Zu^H Zu, y = N^{-1} (C + sigma Zu)^H r, x = x + Zu y,
/// r = r - (C + sigma Zu) y. With sigma = 0 this is initial_projection.
ProjectionResult initial_shift_projection(const RecycleSpace& rspace,
                                          const RecycleProjectionCache& cache,
                                          Shift sigma_rel, const Vector& x_prev,
                                          const Vector& r_prev);
ProjectionResult initial_shift_projection(const RecycleSpace& rspace,
                                          Shift sigma_rel, const Vector& x_prev,
                                          const Vector& r_prev);

/// Recycled GMRES on the base system with initial and per-cycle seed
/// projections for the other shifts, harmonic-Ritz space refresh after
/// every cycle and recursion (as iteration) over the unconverged shifts.
/// Returns the final recycle space for the next family in a sequence.
std::pair<SolveReport, RecycleSpace> srgmres_solve(ShiftedFamily& family,
                                                   const Preconditioner& p,
                                                   const RecycleSpace& rspace_in,
                                                   const SolveOptions& opts);

}  // namespace krylov
