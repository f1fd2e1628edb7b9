#include "krylov/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace krylov {

void SparseOperator::validate() const {
  if (nrows < 0 || ncols < 0) throw InvariantError("negative dimension");
  if (static_cast<Index>(row_ptr.size()) != nrows + 1)
    throw InvariantError("row_ptr length must be nrows+1");
  if (row_ptr.front() != 0) throw InvariantError("row_ptr[0] must be 0");
  for (Index i = 0; i < nrows; ++i)
    if (row_ptr[i] > row_ptr[i + 1])
      throw InvariantError("row_ptr must be nondecreasing");
  if (row_ptr.back() != nnz())
    throw InvariantError("row_ptr[nrows] must equal nnz");
  if (col_idx.size() != values.size())
    throw InvariantError("col_idx/values size mismatch");
  for (Index i = 0; i < nrows; ++i) {
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] < 0 || col_idx[p] >= ncols)
        throw InvariantError("column index out of range");
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
        throw InvariantError("column indices must be strictly increasing per row");
      if (!is_finite(values[p]))
        throw InvariantError("non-finite value in sparse matrix");
    }
  }
}

double SparseOperator::norm1() const {
  std::vector<double> colsum(static_cast<size_t>(ncols), 0.0);
  for (Index p = 0; p < nnz(); ++p)
    colsum[static_cast<size_t>(col_idx[p])] += std::abs(values[p]);
  double m = 0.0;
  for (double c : colsum) m = std::max(m, c);
  return m;
}

SparseOperator SparseOperator::identity(Index n) {
  SparseOperator a;
  a.nrows = a.ncols = n;
  a.row_ptr.resize(static_cast<size_t>(n) + 1);
  a.col_idx.resize(static_cast<size_t>(n));
  a.values.assign(static_cast<size_t>(n), Complex(1.0, 0.0));
  for (Index i = 0; i <= n; ++i) a.row_ptr[static_cast<size_t>(i)] = i;
  for (Index i = 0; i < n; ++i) a.col_idx[static_cast<size_t>(i)] = i;
  return a;
}

SparseOperator from_triplets(Index nrows, Index ncols,
                             std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  SparseOperator op;
  op.nrows = nrows;
  op.ncols = ncols;
  op.row_ptr.assign(static_cast<size_t>(nrows) + 1, 0);
  op.col_idx.reserve(triplets.size());
  op.values.reserve(triplets.size());
  for (size_t t = 0; t < triplets.size(); ++t) {
    auto [i, j, v] = triplets[t];
    if (i < 0 || i >= nrows || j < 0 || j >= ncols)
      throw DimensionError("triplet index out of range");
    if (!op.col_idx.empty() && t > 0 &&
        std::get<0>(triplets[t - 1]) == i && std::get<1>(triplets[t - 1]) == j) {
      op.values.back() += v;  // merge duplicate
    } else {
      op.col_idx.push_back(j);
      op.values.push_back(v);
      op.row_ptr[static_cast<size_t>(i) + 1]++;
    }
  }
  for (Index i = 0; i < nrows; ++i)
    op.row_ptr[static_cast<size_t>(i) + 1] += op.row_ptr[static_cast<size_t>(i)];
  return op;
}

Vector spmv(const SparseOperator& op, const Vector& x, Shift sigma) {
  if (x.size() != op.ncols) throw DimensionError("spmv: dimension mismatch");
  const bool shifted = sigma.value != Complex(0.0, 0.0);
  if (shifted && op.nrows != op.ncols)
    throw DimensionError("spmv: shifted application requires a square matrix");
  Vector y(op.nrows);
  for (Index i = 0; i < op.nrows; ++i) {
    Complex acc(0.0, 0.0);
    for (Index p = op.row_ptr[static_cast<size_t>(i)];
         p < op.row_ptr[static_cast<size_t>(i) + 1]; ++p)
      acc += op.values[static_cast<size_t>(p)] * x[op.col_idx[static_cast<size_t>(p)]];
    y[i] = shifted ? acc + sigma.value * x[i] : acc;
  }
  return y;
}

SparseOperator shifted_copy(const SparseOperator& op, Complex sigma) {
  if (op.nrows != op.ncols)
    throw DimensionError("shifted_copy: square matrix required");
  if (sigma == Complex(0.0, 0.0)) return op;
  std::vector<Triplet> trips;
  trips.reserve(op.values.size() + static_cast<size_t>(op.nrows));
  for (Index i = 0; i < op.nrows; ++i)
    for (Index p = op.row_ptr[static_cast<size_t>(i)];
         p < op.row_ptr[static_cast<size_t>(i) + 1]; ++p)
      trips.emplace_back(i, op.col_idx[static_cast<size_t>(p)],
                         op.values[static_cast<size_t>(p)]);
  for (Index i = 0; i < op.nrows; ++i) trips.emplace_back(i, i, sigma);
  return from_triplets(op.nrows, op.ncols, std::move(trips));
}

DenseMatrix to_dense(const SparseOperator& op) {
  DenseMatrix d = DenseMatrix::Zero(op.nrows, op.ncols);
  for (Index i = 0; i < op.nrows; ++i)
    for (Index p = op.row_ptr[static_cast<size_t>(i)];
         p < op.row_ptr[static_cast<size_t>(i) + 1]; ++p)
      d(i, op.col_idx[static_cast<size_t>(p)]) += op.values[static_cast<size_t>(p)];
  return d;
}

}  // namespace krylov
