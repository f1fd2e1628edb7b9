#include "krylov/shifted_core.hpp"

#include <Eigen/QR>

#include "krylov/kernels.hpp"

namespace krylov {

void validate_search_space(const SearchSpace& space, const SparseOperator& op,
                           Shift sigma, double rel_tol) {
  if (space.S.rows() != op.nrows || space.AS_sigma.rows() != op.nrows ||
      space.S.cols() != space.AS_sigma.cols())
    throw DimensionError("search space dimension mismatch");
  for (Index j = 0; j < space.S.cols(); ++j) {
    const Vector image = spmv(op, space.S.col(j), sigma);
    const double scale = std::max(image.norm(), 1e-300);
    if ((image - space.AS_sigma.col(j)).norm() > rel_tol * scale)
      throw InvariantError("AS_sigma column is not the shifted image of S");
  }
}

std::pair<Vector, Vector> project_minres(const SearchSpace& space,
                                         const Vector& x0, const Vector& r0) {
  if (space.dim() == 0) throw DimensionError("project_minres: empty space");
  if (space.S.rows() != x0.size() || space.AS_sigma.rows() != r0.size())
    throw DimensionError("project_minres: vector dimension mismatch");
  DenseMatrix N = space.AS_sigma.adjoint() * space.AS_sigma;
  N = ((N + N.adjoint()) * 0.5).eval();
  const Vector rhs = space.AS_sigma.adjoint() * r0;
  const Vector y = hermitian_solve(N, rhs);
  Vector r = r0 - space.AS_sigma * y;
  if (r.norm() > r0.norm()) return {x0, r0};  // minimum-residual guard
  Vector x = x0 + space.S * y;
  return {std::move(x), std::move(r)};
}

DecompositionCheck residual_decomposition_check(const SearchSpace& space_m,
                                                const SearchSpace& space_m1,
                                                const Vector& r0) {
  const Index n = r0.size();
  if (space_m.AS_sigma.rows() != n || space_m1.AS_sigma.rows() != n)
    throw DimensionError("residual_decomposition_check: dimension mismatch");

  Eigen::HouseholderQR<DenseMatrix> qr_m1(space_m1.AS_sigma);
  const DenseMatrix q1 =
      qr_m1.householderQ() * DenseMatrix::Identity(n, space_m1.dim());
  const DenseMatrix interior = space_m.AS_sigma - q1 * (q1.adjoint() * space_m.AS_sigma);
  const double m_scale = std::max(space_m.AS_sigma.norm(), 1e-300);
  if (interior.norm() > 1e-8 * m_scale)
    throw InvariantError("residual_decomposition_check: spaces are not nested");

  DecompositionCheck out;
  out.lhs = project_minres(space_m, Vector::Zero(space_m.S.rows()), r0).second;

  Eigen::HouseholderQR<DenseMatrix> qr_m(space_m.AS_sigma);
  const DenseMatrix qm =
      qr_m.householderQ() * DenseMatrix::Identity(n, space_m.dim());
  const Vector inner = q1 * (q1.adjoint() * r0);
  const Vector term1 = inner - qm * (qm.adjoint() * inner);
  const Vector term2 = r0 - q1 * (q1.adjoint() * r0);
  out.rhs = term1 + term2;
  out.term1_norm = term1.norm();
  out.term2_norm = term2.norm();
  out.gap = (out.lhs - out.rhs).norm();
  return out;
}

}  // namespace krylov
