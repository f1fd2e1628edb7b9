#include "krylov/rgmres.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace krylov {

namespace {

constexpr double kRankTol = 1e-12;

// X R^{-1} for upper triangular R, via R^H Y = X^H.
DenseMatrix right_triangular_solve(const DenseMatrix& X, const DenseMatrix& R) {
  DenseMatrix yt = R.adjoint()
                       .triangularView<Eigen::Lower>()
                       .solve(DenseMatrix(X.adjoint()));
  return yt.adjoint();
}

struct QrNormalized {
  DenseMatrix Q;
  DenseMatrix R;  // kept leading block
  Index kept = 0;
};

// Thin QR with trailing columns dropped once a diagonal falls under
// kRankTol * ||X||.
QrNormalized qr_normalize(const DenseMatrix& X) {
  QrNormalized out;
  const Index n = X.rows(), k = X.cols();
  if (k == 0) {
    out.Q = DenseMatrix(n, 0);
    out.R = DenseMatrix(0, 0);
    return out;
  }
  Eigen::HouseholderQR<DenseMatrix> qr(X);
  DenseMatrix r_full =
      qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double scale = std::max(X.norm(), 1e-300);
  Index kept = 0;
  while (kept < k && std::abs(r_full(kept, kept)) >= kRankTol * scale) ++kept;
  out.kept = kept;
  out.Q = qr.householderQ() * DenseMatrix::Identity(n, kept);
  out.R = r_full.topLeftCorner(kept, kept);
  return out;
}

}  // namespace

DenseMatrix assemble_augmented_relation(const DenseMatrix& B,
                                        const DenseMatrix& H) {
  const Index k = B.rows();
  const Index j = H.cols();
  DenseMatrix g = DenseMatrix::Zero(k + j + 1, k + j);
  g.topLeftCorner(k, k).setIdentity();
  if (j > 0) {
    g.topRightCorner(k, j) = B;
    g.bottomRightCorner(j + 1, j) = H;
  }
  return g;
}

AugCycleOutcome rgmres_cycle(const SparseOperator& op, Shift base_shift,
                             const Preconditioner& p, const Vector& b,
                             const Vector& x0, const Vector& r0,
                             const RecycleSpace& rspace, Index m,
                             double abs_tol, OpCounters& counters) {
  (void)b;
  if (!rspace.empty() && rspace.U.rows() != op.nrows)
    throw DimensionError("rgmres_cycle: recycle space dimension mismatch");
  const DenseMatrix* c_ptr = rspace.empty() ? nullptr : &rspace.C;
  const DenseMatrix* zu_ptr = rspace.empty() ? nullptr : &rspace.Zu;
  detail::EngineOutcome eng = detail::arnoldi_cycle(
      op, base_shift, p, x0, r0, c_ptr, zu_ptr, m, abs_tol, counters);
  AugCycleOutcome out;
  out.x = std::move(eng.x);
  out.r = std::move(eng.r);
  static_cast<ArnoldiData&>(out.data) = std::move(eng.data);
  out.data.B = rspace.empty() ? DenseMatrix(0, out.data.steps) : eng.B;
  out.data.G = assemble_augmented_relation(out.data.B, out.data.H);
  out.matvecs = eng.matvecs;
  out.resnorm = eng.resnorm;
  out.converged = eng.converged;
  out.happy_breakdown = eng.happy_breakdown;
  return out;
}

std::pair<Vector, Vector> initial_projection(const RecycleSpace& rspace,
                                             const Vector& x_prev,
                                             const Vector& r_prev) {
  if (rspace.empty()) return {x_prev, r_prev};
  if (rspace.C.rows() != r_prev.size())
    throw DimensionError("initial_projection: dimension mismatch");
  const Vector t = rspace.C.adjoint() * r_prev;
  Vector r0 = r_prev - rspace.C * t;
  if (r0.norm() > r_prev.norm()) return {x_prev, r_prev};
  Vector x0 = x_prev + rspace.Zu * t;
  return {std::move(x0), std::move(r0)};
}

SpaceUpdateResult harmonic_ritz_update(const AugmentedArnoldiData& data,
                                       const RecycleSpace& old_space,
                                       Index k_target) {
  const Index j = data.steps;
  const Index k_old = old_space.k();
  const Index s = k_old + j;
  SpaceUpdateResult out{old_space, false};
  if (s == 0) return out;
  if (k_target > s) k_target = s;
  if (k_target == 0) {
    out.space = RecycleSpace::empty_space(data.V.rows());
    out.updated = true;
    return out;
  }

  // W = [C V_{j+1}]^H [U V_j]; C^H V_j = 0 by construction.
  DenseMatrix w = DenseMatrix::Zero(s + 1, s);
  if (k_old > 0) {
    w.topLeftCorner(k_old, k_old) = old_space.C.adjoint() * old_space.U;
    w.block(k_old, 0, j + 1, k_old) = data.V.adjoint() * old_space.U;
  }
  w.block(k_old, k_old, j, j).setIdentity();

  const DenseMatrix gram = data.G.adjoint() * data.G;
  const DenseMatrix pencil_rhs = data.G.adjoint() * w;
  Eigen::FullPivLU<DenseMatrix> lu(pencil_rhs);
  if (!lu.isInvertible()) return out;
  Eigen::ComplexEigenSolver<DenseMatrix> es(lu.solve(gram));
  if (es.info() != Eigen::Success) return out;

  std::vector<Index> order(static_cast<size_t>(s));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& theta = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(theta[a]) < std::abs(theta[b]);
  });

  DenseMatrix coords(s, k_target);
  for (Index i = 0; i < k_target; ++i)
    coords.col(i) = es.eigenvectors().col(order[static_cast<size_t>(i)]);

  DenseMatrix u_raw = data.V.leftCols(j) * coords.bottomRows(j);
  DenseMatrix zu_raw = data.Z * coords.bottomRows(j);
  const DenseMatrix g_coords = data.G * coords;
  DenseMatrix c_raw = data.V * g_coords.bottomRows(j + 1);
  if (k_old > 0) {
    u_raw += old_space.U * coords.topRows(k_old);
    zu_raw += old_space.Zu * coords.topRows(k_old);
    c_raw += old_space.C * g_coords.topRows(k_old);
  }

  QrNormalized qr = qr_normalize(c_raw);
  if (qr.kept == 0) return out;
  out.space.C = qr.Q;
  out.space.U = right_triangular_solve(u_raw.leftCols(qr.kept), qr.R);
  out.space.Zu = right_triangular_solve(zu_raw.leftCols(qr.kept), qr.R);
  out.updated = true;
  return out;
}

RecycleSpace rebase_shift(const RecycleSpace& rspace, Complex delta) {
  if (rspace.empty() || delta == Complex(0.0, 0.0)) return rspace;
  QrNormalized qr = qr_normalize(rspace.C + delta * rspace.Zu);
  RecycleSpace next;
  next.C = qr.Q;
  next.U = right_triangular_solve(rspace.U.leftCols(qr.kept), qr.R);
  next.Zu = right_triangular_solve(rspace.Zu.leftCols(qr.kept), qr.R);
  return next;
}

RecycleSpace rebuild_for_operator(const SparseOperator& op, Shift base_shift,
                                  const Preconditioner& p, const DenseMatrix& U,
                                  OpCounters& counters) {
  const Index n = op.nrows;
  const Index k = U.cols();
  if (k == 0) return RecycleSpace::empty_space(n);
  if (U.rows() != n) throw DimensionError("rebuild_for_operator: dimension mismatch");
  DenseMatrix zu(n, k), c_raw(n, k);
  for (Index i = 0; i < k; ++i) {
    zu.col(i) = apply_inverse(p, U.col(i));
    if (!p.is_identity()) counters.precond_applies++;
    c_raw.col(i) = spmv(op, zu.col(i), base_shift);
    counters.matvecs++;
  }
  QrNormalized qr = qr_normalize(c_raw);
  RecycleSpace next;
  next.C = qr.Q;
  next.U = right_triangular_solve(U.leftCols(qr.kept), qr.R);
  next.Zu = right_triangular_solve(zu.leftCols(qr.kept), qr.R);
  return next;
}

}  // namespace krylov
