#pragma once

#include <functional>
#include <vector>

#include "krylov/types.hpp"

namespace krylov {

struct ArnoldiData;
struct AugmentedArnoldiData;
struct RecycleSpace;

enum class ShiftConvention { Relative, Absolute };

/// Per-system solve accounting. Base-cycle operator applications are
/// attributed once, to the system whose cycles generated them.
struct SystemReport {
  Complex shift{0.0, 0.0};
  long matvecs = 0;
  long precond_applies = 0;
  Index cycles = 0;
  std::vector<double> residual_history;  // relative norms, one entry per event
  bool converged = false;
  bool projection_skipped = false;  // singular N or no-improvement guard fired
  std::string label;
};

struct SolveReport {
  std::vector<SystemReport> systems;
  long total_matvecs = 0;
  long total_precond_applies = 0;
  long setup_matvecs = 0;          // recycle-space rebuilds (reported apart)
  long setup_precond_applies = 0;
  long space_update_failures = 0;  // harmonic-Ritz refreshes that kept the old space
  double wall_seconds = 0.0;
  bool all_converged = false;
};

/// Snapshot handed to an observer after each base cycle and its shifted
/// projections. Pointers reference solver-owned state valid only during the
/// callback.
struct CycleEvent {
  Index base_index = 0;
  Index cycle = 0;
  Shift base_shift;
  const ArnoldiData* arnoldi = nullptr;
  const AugmentedArnoldiData* augmented = nullptr;  // recycling solver only
  const RecycleSpace* rspace = nullptr;             // space used by this cycle
  std::vector<Index> shift_indices;                 // projected systems
  std::vector<Complex> deltas;                      // projection shifts used
  std::vector<Vector> residual_before;
  std::vector<Vector> residual_after;
};

using CycleObserver = std::function<void(const CycleEvent&)>;

struct SolveOptions {
  Index m = 30;
  Index k = 0;
  double eps = 1e-8;
  Index max_cycles = 200;
  ShiftConvention convention = ShiftConvention::Relative;
  bool parallel_projections = false;
  /// Set when the supplied recycle space already satisfies C = A_p U and
  /// Z_U = M^{-1} U for this operator, base shift and preconditioner.
  bool recycle_space_consistent = false;
  CycleObserver observer;
};

}  // namespace krylov
