#pragma once

#include "krylov/precond.hpp"
#include "krylov/report.hpp"
#include "krylov/sparse.hpp"
#include "krylov/types.hpp"

namespace krylov {

/// Happy-breakdown threshold factor, scaled by ||A||_1 + |sigma|.
inline constexpr double kBreakdownFactor = 1e-14;

/// One cycle's Arnoldi quantities for the preconditioned base operator
/// A_p = (A + sigma_1 I) M^{-1}:
///   V: n x (steps+1) orthonormal basis,
///   H: (steps+1) x steps upper Hessenberg with A_p V = V_{steps+1} H,
///   Z: n x steps preconditioned basis M^{-1} V_steps.
struct ArnoldiData {
  DenseMatrix V;
  DenseMatrix H;
  DenseMatrix Z;
  Index steps = 0;
};

struct CycleOutcome {
  Vector x;
  Vector r;
  ArnoldiData data;
  long matvecs = 0;
  double resnorm = 0.0;  // Givens estimate of ||b - (A+sigma_1 I) x||
  bool converged = false;
  bool happy_breakdown = false;
};

/// One restarted, right-preconditioned GMRES cycle of at most m steps for
/// the system (A + base_shift I) x = b, starting from x0 with residual r0
/// (caller-supplied so an exact x0 costs no operator application). Stops
/// early on ||r|| <= abs_tol or happy breakdown.
CycleOutcome gmres_cycle(const SparseOperator& op, Shift base_shift,
                         const Preconditioner& p, const Vector& b,
                         const Vector& x0, const Vector& r0, Index m,
                         double abs_tol, OpCounters& counters);

/// Convenience overload computing r0 = b - (A + base_shift I) x0 (counted,
/// unless x0 is zero).
CycleOutcome gmres_cycle(const SparseOperator& op, Shift base_shift,
                         const Preconditioner& p, const Vector& b,
                         const Vector& x0, Index m, double abs_tol,
                         OpCounters& counters);

namespace detail {

/// Shared cycle engine; with a recycle image basis C it additionally
/// projects each Arnoldi vector out of range(C), collecting the
/// coefficients B = C^H A_p V, and folds the recycle correction -Zu (B y)
/// into the solution update.
struct EngineOutcome {
  Vector x;
  Vector r;
  ArnoldiData data;
  DenseMatrix B;  // k x steps
  long matvecs = 0;
  double resnorm = 0.0;
  bool converged = false;
  bool happy_breakdown = false;
};

EngineOutcome arnoldi_cycle(const SparseOperator& op, Shift base_shift,
                            const Preconditioner& p, const Vector& x0,
                            const Vector& r0, const DenseMatrix* C,
                            const DenseMatrix* Zu, Index m, double abs_tol,
                            OpCounters& counters);

}  // namespace detail

}  // namespace krylov
