#include "krylov/precond.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace krylov {

namespace {

// Position of column j within row i of op, or -1.
Index find_pos(const SparseOperator& op, Index i, Index j, Index from) {
  const Index lo = from, hi = op.row_ptr[static_cast<size_t>(i) + 1];
  auto first = op.col_idx.begin() + lo;
  auto last = op.col_idx.begin() + hi;
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<Index>(it - op.col_idx.begin());
}

}  // namespace

Preconditioner ilu0_factor(const SparseOperator& op) {
  if (op.nrows != op.ncols)
    throw DimensionError("ilu0_factor: square matrix required");
  op.validate();
  const Index n = op.nrows;
  std::vector<Index> diag_pos(static_cast<size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    diag_pos[static_cast<size_t>(i)] =
        find_pos(op, i, i, op.row_ptr[static_cast<size_t>(i)]);
    if (diag_pos[static_cast<size_t>(i)] < 0)
      throw ZeroPivotError("ilu0_factor: structurally zero diagonal in row " +
                               std::to_string(i),
                           i);
  }

  std::vector<Complex> val = op.values;
  for (Index i = 0; i < n; ++i) {
    const Index row_begin = op.row_ptr[static_cast<size_t>(i)];
    const Index row_end = op.row_ptr[static_cast<size_t>(i) + 1];
    for (Index p = row_begin; p < row_end; ++p) {
      const Index k = op.col_idx[static_cast<size_t>(p)];
      if (k >= i) break;
      const Complex pivot = val[static_cast<size_t>(diag_pos[static_cast<size_t>(k)])];
      val[static_cast<size_t>(p)] /= pivot;
      const Complex lik = val[static_cast<size_t>(p)];
      for (Index q = diag_pos[static_cast<size_t>(k)] + 1;
           q < op.row_ptr[static_cast<size_t>(k) + 1]; ++q) {
        const Index j = op.col_idx[static_cast<size_t>(q)];
        const Index pos = find_pos(op, i, j, p + 1);
        if (pos >= 0) val[static_cast<size_t>(pos)] -= lik * val[static_cast<size_t>(q)];
      }
    }
    const Complex uii = val[static_cast<size_t>(diag_pos[static_cast<size_t>(i)])];
    if (std::abs(uii) < 1e-300)
      throw ZeroPivotError("ilu0_factor: zero pivot in row " + std::to_string(i), i);
  }

  Preconditioner out;
  out.kind = PrecondKind::Ilu0;
  std::vector<Triplet> ltrip, utrip;
  for (Index i = 0; i < n; ++i) {
    ltrip.emplace_back(i, i, Complex(1.0, 0.0));
    for (Index p = op.row_ptr[static_cast<size_t>(i)];
         p < op.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      const Index j = op.col_idx[static_cast<size_t>(p)];
      if (j < i)
        ltrip.emplace_back(i, j, val[static_cast<size_t>(p)]);
      else
        utrip.emplace_back(i, j, val[static_cast<size_t>(p)]);
    }
  }
  out.L = from_triplets(n, n, std::move(ltrip));
  out.Umat = from_triplets(n, n, std::move(utrip));
  return out;
}

Vector apply_inverse(const Preconditioner& p, const Vector& v) {
  if (p.is_identity()) return v;
  const Index n = p.L.nrows;
  if (v.size() != n) throw DimensionError("apply_inverse: dimension mismatch");

  // Forward solve with unit-lower L.
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    Complex acc = v[i];
    for (Index q = p.L.row_ptr[static_cast<size_t>(i)];
         q < p.L.row_ptr[static_cast<size_t>(i) + 1]; ++q) {
      const Index j = p.L.col_idx[static_cast<size_t>(q)];
      if (j < i) acc -= p.L.values[static_cast<size_t>(q)] * y[j];
    }
    y[i] = acc;
  }

  // Backward solve with upper Umat; diagonal is the first entry of each row.
  Vector x(n);
  for (Index i = n - 1; i >= 0; --i) {
    Complex acc = y[i];
    Complex diag(0.0, 0.0);
    for (Index q = p.Umat.row_ptr[static_cast<size_t>(i)];
         q < p.Umat.row_ptr[static_cast<size_t>(i) + 1]; ++q) {
      const Index j = p.Umat.col_idx[static_cast<size_t>(q)];
      if (j == i)
        diag = p.Umat.values[static_cast<size_t>(q)];
      else
        acc -= p.Umat.values[static_cast<size_t>(q)] * x[j];
    }
    x[i] = acc / diag;
  }
  return x;
}

}  // namespace krylov
