#pragma once

#include "krylov/sparse.hpp"
#include "krylov/types.hpp"

namespace krylov {

enum class PrecondKind { Identity, Ilu0 };

/// Right preconditioner M, applied as M^{-1} v. The ilu0 kind stores the
/// unit-lower and upper triangular factors on the source sparsity pattern.
struct Preconditioner {
  PrecondKind kind = PrecondKind::Identity;
  SparseOperator L;
  SparseOperator Umat;

  static Preconditioner identity() { return {}; }
  bool is_identity() const { return kind == PrecondKind::Identity; }
};

/// Zero-fill incomplete LU factorization. Requires a square matrix with a
/// structurally nonzero diagonal; throws ZeroPivotError naming the row when
/// a pivot vanishes.
Preconditioner ilu0_factor(const SparseOperator& op);

/// M^{-1} v: identity returns v; ilu0 performs the two triangular solves.
Vector apply_inverse(const Preconditioner& p, const Vector& v);

}  // namespace krylov
