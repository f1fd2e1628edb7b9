#include "krylov/gmres.hpp"

#include <cmath>

#include "krylov/kernels.hpp"

namespace krylov {
namespace detail {

namespace {

// Deterministic orthonormal completion for the column left dangling by a
// happy breakdown: first Cartesian direction with a usable remainder.
Vector orthonormal_completion(const DenseMatrix& V, Index cols) {
  const Index n = V.rows();
  for (Index trial = 0; trial < n; ++trial) {
    Vector e = Vector::Unit(n, trial);
    MgsResult res = mgs_orthogonalize(e, V.leftCols(cols));
    const double nrm = res.w_orth.norm();
    if (nrm > 0.5) return res.w_orth / nrm;
  }
  return Vector::Zero(n);
}

}  // namespace

EngineOutcome arnoldi_cycle(const SparseOperator& op, Shift base_shift,
                            const Preconditioner& p, const Vector& x0,
                            const Vector& r0, const DenseMatrix* C,
                            const DenseMatrix* Zu, Index m, double abs_tol,
                            OpCounters& counters) {
  const Index n = op.nrows;
  const Index k = C ? C->cols() : 0;
  if (m < 1) throw DimensionError("arnoldi_cycle: cycle length must be >= 1");
  if (x0.size() != n || r0.size() != n)
    throw DimensionError("arnoldi_cycle: vector dimension mismatch");

  EngineOutcome out;
  out.x = x0;
  out.r = r0;
  const double beta = r0.norm();
  if (beta == 0.0 || beta <= abs_tol) {
    out.data.V = DenseMatrix(n, beta > 0.0 ? 1 : 0);
    if (beta > 0.0) out.data.V.col(0) = r0 / beta;
    out.data.H = DenseMatrix::Zero(out.data.V.cols(), 0);
    out.data.Z = DenseMatrix(n, 0);
    out.B = DenseMatrix(k, 0);
    out.resnorm = beta;
    out.converged = true;
    return out;
  }

  const double breakdown_tol =
      kBreakdownFactor * (op.norm1() + std::abs(base_shift.value));
  const long matvecs_at_entry = counters.matvecs;

  DenseMatrix V(n, m + 1), H = DenseMatrix::Zero(m + 1, m), Z(n, m);
  DenseMatrix B = DenseMatrix::Zero(k, m);
  V.col(0) = r0 / beta;
  GivensLsq lsq(beta, m);

  Index steps = 0;
  for (Index j = 0; j < m; ++j) {
    Vector z = apply_inverse(p, V.col(j));
    if (!p.is_identity()) counters.precond_applies++;
    Z.col(j) = z;
    Vector w = spmv(op, z, base_shift);
    counters.matvecs++;

    if (k > 0) {
      MgsResult cres = mgs_orthogonalize(w, *C);
      B.col(j) = cres.coeffs;
      w = std::move(cres.w_orth);
    }
    MgsResult hres = mgs_orthogonalize(w, V.leftCols(j + 1));
    H.col(j).head(j + 1) = hres.coeffs;
    const double hn = hres.w_orth.norm();
    H(j + 1, j) = hn;
    steps = j + 1;

    if (hn <= breakdown_tol) {
      out.happy_breakdown = true;
      V.col(j + 1) = orthonormal_completion(V, j + 1);
      out.resnorm = lsq.append_column(H.block(0, j, j + 2, 1));
      break;
    }
    V.col(j + 1) = hres.w_orth / hn;
    out.resnorm = lsq.append_column(H.block(0, j, j + 2, 1));
    if (out.resnorm <= abs_tol) break;
  }

  Vector y = lsq.solve();
  out.x = x0 + Z.leftCols(steps) * y;
  if (k > 0) out.x -= *Zu * (B.leftCols(steps) * y);
  out.r = r0 - V.leftCols(steps + 1) * (H.topLeftCorner(steps + 1, steps) * y);

  out.data.V = V.leftCols(steps + 1);
  out.data.H = H.topLeftCorner(steps + 1, steps);
  out.data.Z = Z.leftCols(steps);
  out.data.steps = steps;
  out.B = B.leftCols(steps);
  out.matvecs = counters.matvecs - matvecs_at_entry;
  out.converged = out.resnorm <= abs_tol;
  return out;
}

}  // namespace detail

CycleOutcome gmres_cycle(const SparseOperator& op, Shift base_shift,
                         const Preconditioner& p, const Vector& b,
                         const Vector& x0, const Vector& r0, Index m,
                         double abs_tol, OpCounters& counters) {
  (void)b;
  detail::EngineOutcome eng = detail::arnoldi_cycle(
      op, base_shift, p, x0, r0, nullptr, nullptr, m, abs_tol, counters);
  CycleOutcome out;
  out.x = std::move(eng.x);
  out.r = std::move(eng.r);
  out.data = std::move(eng.data);
  out.matvecs = eng.matvecs;
  out.resnorm = eng.resnorm;
  out.converged = eng.converged;
  out.happy_breakdown = eng.happy_breakdown;
  return out;
}

CycleOutcome gmres_cycle(const SparseOperator& op, Shift base_shift,
                         const Preconditioner& p, const Vector& b,
                         const Vector& x0, Index m, double abs_tol,
                         OpCounters& counters) {
  Vector r0;
  if (x0.isZero(0.0)) {
    r0 = b;
  } else {
    r0 = b - spmv(op, x0, base_shift);
    counters.matvecs++;
  }
  return gmres_cycle(op, base_shift, p, b, x0, r0, m, abs_tol, counters);
}

}  // namespace krylov
