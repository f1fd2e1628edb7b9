#pragma once

#include "krylov/sparse.hpp"
#include "krylov/types.hpp"

namespace krylov {

/// Generic search space for a minimum-residual projection: S holds the
/// solution-update basis (any preconditioning already folded in) and
/// AS_sigma the image of S under the shifted operator.
struct SearchSpace {
  DenseMatrix S;
  DenseMatrix AS_sigma;

  Index dim() const { return S.cols(); }
};

/// Checks columnwise that AS_sigma = (A + sigma I) S to the given relative
/// tolerance; throws InvariantError otherwise.
void validate_search_space(const SearchSpace& space, const SparseOperator& op,
                           Shift sigma, double rel_tol = 1e-12);

/// Minimum-residual projection of (x0, r0) onto the space: solves the Gram
/// system N y = AS^H r0 with N = AS^H AS and updates x = x0 + S y,
/// r = r0 - AS y, leaving r orthogonal to range(AS). Never increases
/// ||r||; throws SingularMatrixError for a degenerate space.
std::pair<Vector, Vector> project_minres(const SearchSpace& space,
                                         const Vector& x0, const Vector& r0);

struct DecompositionCheck {
  Vector lhs;  // projected residual against the smaller space
  Vector rhs;  // two-term decomposition through the larger space
  double term1_norm = 0.0;  // deflected interior part
  double term2_norm = 0.0;  // part outside the larger space
  double gap = 0.0;
};

/// Residual-decomposition diagnostic for nested image spaces
/// range(space_m.AS_sigma) within range(space_m1.AS_sigma): the projected
/// residual equals the sum of the deflected interior part and the exterior
/// part. Throws InvariantError when the nesting precondition fails.
DecompositionCheck residual_decomposition_check(const SearchSpace& space_m,
                                                const SearchSpace& space_m1,
                                                const Vector& r0);

}  // namespace krylov
