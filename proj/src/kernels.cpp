#include "krylov/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace krylov {

MgsResult mgs_orthogonalize(const Vector& w,
                            const Eigen::Ref<const DenseMatrix>& basis) {
  const Index k = basis.cols();
  if (k > 0 && basis.rows() != w.size())
    throw DimensionError("mgs_orthogonalize: basis/vector dimension mismatch");
  MgsResult out;
  out.coeffs = Vector::Zero(k);
  out.w_orth = w;
  const double wnorm = w.norm();
  if (k == 0 || wnorm == 0.0) return out;
  for (Index i = 0; i < k; ++i) {
    const Complex c = basis.col(i).dot(out.w_orth);
    out.coeffs[i] = c;
    out.w_orth -= c * basis.col(i);
  }
  // One corrective pass if orthogonality degraded.
  Vector t = basis.adjoint() * out.w_orth;
  if (t.size() > 0 && t.cwiseAbs().maxCoeff() > kReorthTol * wnorm) {
    out.w_orth -= basis * t;
    out.coeffs += t;
  }
  return out;
}

namespace {

// c real, s complex with [c s; -conj(s) c] [a; b] = [r; 0].
void make_rotation(Complex a, Complex b, double& c, Complex& s, Complex& r) {
  const double aa = std::abs(a), bb = std::abs(b);
  if (bb == 0.0) {
    c = 1.0;
    s = Complex(0.0, 0.0);
    r = a;
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = std::conj(b) / bb;
    r = bb;
    return;
  }
  const double t = std::hypot(aa, bb);
  const Complex alpha = a / aa;
  c = aa / t;
  s = alpha * std::conj(b) / t;
  r = alpha * t;
}

}  // namespace

GivensLsq::GivensLsq(double beta, Index max_cols)
    : GivensLsq(Vector::Unit(max_cols + 1, 0) * Complex(beta, 0.0), max_cols) {}

GivensLsq::GivensLsq(const Vector& rhs, Index max_cols) {
  r_ = DenseMatrix::Zero(max_cols, max_cols);
  g_ = Vector::Zero(max_cols + 1);
  g_.head(std::min(rhs.size(), g_.size())) = rhs.head(std::min(rhs.size(), g_.size()));
  cs_.reserve(static_cast<size_t>(max_cols));
  sn_.reserve(static_cast<size_t>(max_cols));
  resnorm_ = std::abs(g_[0]);
}

double GivensLsq::append_column(const Vector& h_col) {
  if (j_ >= r_.cols()) throw DimensionError("GivensLsq: capacity exhausted");
  if (h_col.size() != j_ + 2)
    throw DimensionError("GivensLsq: column must have j+2 entries");
  Vector h = h_col;
  for (Index i = 0; i < j_; ++i) {
    const Complex tmp = cs_[static_cast<size_t>(i)] * h[i] + sn_[static_cast<size_t>(i)] * h[i + 1];
    h[i + 1] = -std::conj(sn_[static_cast<size_t>(i)]) * h[i] + cs_[static_cast<size_t>(i)] * h[i + 1];
    h[i] = tmp;
  }
  double c;
  Complex s, r;
  make_rotation(h[j_], h[j_ + 1], c, s, r);
  cs_.push_back(c);
  sn_.push_back(s);
  r_.col(j_).head(j_) = h.head(j_);
  r_(j_, j_) = r;
  const Complex g_next = -std::conj(s) * g_[j_];
  g_[j_] = c * g_[j_] + s * g_[j_ + 1];
  g_[j_ + 1] = g_next;
  ++j_;
  resnorm_ = std::abs(g_[j_]);
  const double scale = r_.topLeftCorner(j_, j_).cwiseAbs().maxCoeff();
  if (std::abs(r_(j_ - 1, j_ - 1)) <= 1e-14 * scale) rank_deficient_ = true;
  return resnorm_;
}

Vector GivensLsq::solve() const {
  Vector y = Vector::Zero(j_);
  const double scale = j_ > 0 ? r_.topLeftCorner(j_, j_).cwiseAbs().maxCoeff() : 0.0;
  for (Index i = j_ - 1; i >= 0; --i) {
    Complex acc = g_[i];
    for (Index l = i + 1; l < j_; ++l) acc -= r_(i, l) * y[l];
    if (std::abs(r_(i, i)) <= 1e-14 * scale) {
      y[i] = Complex(0.0, 0.0);  // deficient pivot: truncate
    } else {
      y[i] = acc / r_(i, i);
    }
  }
  return y;
}

LsqResult hessenberg_lsq(const DenseMatrix& H, const Vector& rhs) {
  const Index j = H.cols();
  if (H.rows() != j + 1)
    throw DimensionError("hessenberg_lsq: H must be (j+1) x j");
  if (rhs.size() != j + 1)
    throw DimensionError("hessenberg_lsq: rhs must have j+1 entries");
  for (Index col = 0; col < j; ++col)
    for (Index row = col + 2; row < j + 1; ++row)
      if (H(row, col) != Complex(0.0, 0.0))
        throw DimensionError("hessenberg_lsq: H is not upper Hessenberg");
  GivensLsq lsq(rhs, j);
  for (Index col = 0; col < j; ++col)
    lsq.append_column(H.block(0, col, col + 2, 1));
  LsqResult out;
  out.y = lsq.solve();
  out.resnorm = lsq.residual_norm();
  out.rank_deficient = lsq.rank_deficient();
  return out;
}

Vector hermitian_solve(const DenseMatrix& N, const Vector& rhs) {
  const Index n = N.rows();
  if (N.cols() != n) throw DimensionError("hermitian_solve: square matrix required");
  if (rhs.size() != n) throw DimensionError("hermitian_solve: rhs dimension mismatch");
  if (n == 0) return Vector(0);
  const double nmax = N.cwiseAbs().maxCoeff();
  const double herm_gap = (N - N.adjoint()).cwiseAbs().maxCoeff();
  if (herm_gap > 1e-12 * std::max(nmax, 1e-300))
    throw InvariantError("hermitian_solve: matrix is not Hermitian");

  Eigen::LLT<DenseMatrix> llt(N);
  if (llt.info() == Eigen::Success) {
    Vector y = llt.solve(rhs);
    const double rhsn = rhs.norm();
    if (rhsn == 0.0 || (N * y - rhs).norm() <= 1e-10 * rhsn) return y;
  }

  // Indefiniteness from roundoff, or an ill-conditioned Gram matrix.
  Eigen::LDLT<DenseMatrix> ldlt(N);
  Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (dmax <= 0.0 || dmin <= 1e-15 * dmax) {
    const double cond = dmax / std::max(dmin, 1e-300);
    throw SingularMatrixError("hermitian_solve: numerically singular matrix", cond);
  }
  return ldlt.solve(rhs);
}

}  // namespace krylov
