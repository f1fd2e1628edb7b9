#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krylov/precond.hpp"
#include "krylov/problems.hpp"
#include "krylov/report.hpp"
#include "krylov/shifted_gmres.hpp"
#include "krylov/shifted_rgmres.hpp"

namespace krylov {

enum class Method { Sgmres, Srgmres, SeqGmres, SeqRgmres };

struct RunConfig {
  Method method = Method::Sgmres;
  Index m = 30;
  Index k = 0;
  double eps = 1e-8;
  Index max_cycles = 200;
  std::vector<Complex> shifts;

  // Problem source: Matrix Market files (a sequence of base matrices) or
  // the synthetic generator.
  std::vector<std::string> matrix_paths;
  Index nx = 20;
  double peclet = 0.8;
  double rotation = 0.0;
  Index sequence_count = 1;  // family members when synthetic

  double kappa_c = 0.0;  // overrides fixture metadata when > 0

  PrecondKind precond = PrecondKind::Identity;
  std::uint64_t seed = 0;
  ShiftConvention convention = ShiftConvention::Relative;
  bool parallel_projections = false;
  bool real_rhs_increments = false;
  int repeats = 3;  // timing repeats; counters are deterministic
};

struct FamilyMember {
  SparseOperator op;
  Vector b;
  std::string label;
};

/// Materializes the family sequence (loading and transforming matrix files
/// or generating the synthetic problem) with the per-member right-hand
/// sides.
std::vector<FamilyMember> build_members(const RunConfig& config);

/// Preconditioner for one member, built from A + sigma_min I with sigma_min
/// the smallest-modulus shift (ties: smallest real part).
Preconditioner build_preconditioner(const RunConfig& config,
                                    const SparseOperator& op);

Complex smallest_shift(const std::vector<Complex>& shifts);

struct RunOutcome {
  SolveReport report;  // merged across sequence members
  std::vector<SolveReport> member_reports;
};

/// Executes the configured method over the whole sequence; wall time is the
/// median over config.repeats identical runs.
RunOutcome run_solve(const RunConfig& config);

std::string report_json(const RunConfig& config, const RunOutcome& outcome);

struct SweepGrid {
  std::vector<Index> ms;
  std::vector<Index> ks;
  Index mk_sum = 0;     // when > 0: pairs (mk_sum - k, k) over ks
  bool marginal = false;  // add shifts one at a time, emit deltas
};

/// One CSV row per grid point (or per added shift in marginal mode);
/// individual run failures are recorded in the row and the sweep continues.
std::string run_sweep_csv(const RunConfig& config, const SweepGrid& grid);

struct DiagnosticsResult {
  std::string decomposition_csv;
  std::string history_csv;
  double max_gap_rel = 0.0;
};

/// Seed-projection diagnostics on a small problem (n <= 5000): runs the
/// shifted solver with an observer, checking the per-cycle residual
/// decomposition identity and recording per-shift improvement.
DiagnosticsResult run_diagnostics(const RunConfig& config);

/// Parses a complex scalar of the form "a", "bi", "a+bi" or "a-bi".
Complex parse_complex(const std::string& text);

}  // namespace krylov
