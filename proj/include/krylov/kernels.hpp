#pragma once

#include <vector>

#include "krylov/types.hpp"

namespace krylov {

/// Reorthogonalization trigger: a second pass runs when the measured
/// loss-of-orthogonality exceeds this times the input norm.
inline constexpr double kReorthTol = 1e-10;

struct MgsResult {
  Vector w_orth;
  Vector coeffs;  // w = basis * coeffs + w_orth
};

/// Modified Gram-Schmidt of w against the (orthonormal) columns of basis,
/// with one corrective reorthogonalization pass when needed.
MgsResult mgs_orthogonalize(const Vector& w,
                            const Eigen::Ref<const DenseMatrix>& basis);

/// Incrementally maintained Givens QR of a growing upper Hessenberg matrix,
/// solving min ||Hbar y - beta e1|| one column at a time.
class GivensLsq {
 public:
  GivensLsq(double beta, Index max_cols);
  GivensLsq(const Vector& rhs, Index max_cols);

  /// Appends Hessenberg column j (entries 0..j+1); returns the updated
  /// least-squares residual norm |g_{j+1}|.
  double append_column(const Vector& h_col);

  Index cols() const { return j_; }
  double residual_norm() const { return resnorm_; }
  bool rank_deficient() const { return rank_deficient_; }

  /// Back-substitution for the current column count.
  Vector solve() const;

 private:
  DenseMatrix r_;               // triangular factor, max_cols x max_cols
  std::vector<double> cs_;      // rotation cosines (real)
  std::vector<Complex> sn_;     // rotation sines
  Vector g_;                    // rotated rhs
  Index j_ = 0;
  double resnorm_ = 0.0;
  bool rank_deficient_ = false;
};

struct LsqResult {
  Vector y;
  double resnorm = 0.0;
  bool rank_deficient = false;  // exact breakdown; caller decides
};

/// One-shot minimum 2-norm residual solve of an upper Hessenberg
/// least-squares problem min ||H y - rhs||, H of size (j+1) x j.
LsqResult hessenberg_lsq(const DenseMatrix& H, const Vector& rhs);

/// Solves N y = rhs for Hermitian N (positive definite in exact arithmetic).
/// Cholesky first, pivoted LDL^H fallback; throws SingularMatrixError with a
/// condition estimate when N is numerically singular.
Vector hermitian_solve(const DenseMatrix& N, const Vector& rhs);

}  // namespace krylov
