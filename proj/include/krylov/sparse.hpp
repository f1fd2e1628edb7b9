#pragma once

#include <tuple>
#include <vector>

#include "krylov/types.hpp"

namespace krylov {

/// Compressed-row complex sparse matrix. Column indices are sorted within
/// each row and duplicate entries are merged by the builders.
struct SparseOperator {
  Index nrows = 0;
  Index ncols = 0;
  std::vector<Index> row_ptr;  // length nrows+1, nondecreasing
  std::vector<Index> col_idx;
  std::vector<Complex> values;

  Index nnz() const { return static_cast<Index>(values.size()); }

  /// Throws InvariantError if the CSR structure is malformed or any stored
  /// value is non-finite.
  void validate() const;

  /// Maximum absolute column sum.
  double norm1() const;

  static SparseOperator identity(Index n);
};

using Triplet = std::tuple<Index, Index, Complex>;

/// Builds CSR from (row, col, value) triplets; duplicates are summed,
/// columns sorted within each row.
SparseOperator from_triplets(Index nrows, Index ncols,
                             std::vector<Triplet> triplets);

/// y = (A + sigma*I) x. With sigma = 0 this is exactly A x (the shift term
/// is added after the row accumulation, so the zero-shift result is
/// bit-identical to the plain product).
Vector spmv(const SparseOperator& op, const Vector& x, Shift sigma = {});

/// A + sigma*I as a concrete CSR matrix. Missing diagonal entries are
/// inserted when sigma != 0.
SparseOperator shifted_copy(const SparseOperator& op, Complex sigma);

/// Dense copy, for small diagnostics and test oracles.
DenseMatrix to_dense(const SparseOperator& op);

}  // namespace krylov
