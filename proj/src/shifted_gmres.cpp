#include "krylov/shifted_gmres.hpp"

#include <cmath>

#include "krylov/detail/parallel.hpp"
#include "krylov/kernels.hpp"

namespace krylov {

ShiftedFamily ShiftedFamily::make(const SparseOperator& op, Vector b,
                                  std::vector<Shift> shifts,
                                  std::vector<Vector> x0,
                                  bool allow_duplicate_shifts) {
  if (op.nrows != op.ncols)
    throw DimensionError("ShiftedFamily: square operator required");
  if (b.size() != op.nrows)
    throw DimensionError("ShiftedFamily: right-hand side dimension mismatch");
  if (shifts.empty()) throw DimensionError("ShiftedFamily: at least one shift");
  for (const Shift& s : shifts)
    if (!is_finite(s.value)) throw InvariantError("ShiftedFamily: non-finite shift");
  if (!allow_duplicate_shifts) {
    for (size_t i = 0; i < shifts.size(); ++i)
      for (size_t j = i + 1; j < shifts.size(); ++j)
        if (shifts[i].value == shifts[j].value)
          throw InvariantError("ShiftedFamily: shifts must be pairwise distinct");
  }
  if (x0.empty()) x0.assign(shifts.size(), Vector::Zero(op.nrows));
  if (x0.size() != shifts.size())
    throw DimensionError("ShiftedFamily: one initial guess per shift");
  for (const Vector& v : x0)
    if (v.size() != op.nrows)
      throw DimensionError("ShiftedFamily: initial guess dimension mismatch");
  ShiftedFamily fam{op, std::move(b), std::move(shifts), std::move(x0), {}, {}};
  fam.r.resize(fam.shifts.size());
  fam.converged.assign(fam.shifts.size(), 0);
  return fam;
}

ProjectionCache build_projection_cache(const ArnoldiData& data) {
  ProjectionCache cache;
  const DenseMatrix vtz = data.V.adjoint() * data.Z;
  cache.HtVZ = data.H.adjoint() * vtz;
  DenseMatrix hth = data.H.adjoint() * data.H;
  DenseMatrix ztz = data.Z.adjoint() * data.Z;
  cache.HtH = (hth + hth.adjoint()) * 0.5;
  cache.ZtZ = (ztz + ztz.adjoint()) * 0.5;
  return cache;
}

DenseMatrix assemble_N_sigma(const ProjectionCache& cache, Shift sigma) {
  const Complex s = sigma.value;
  DenseMatrix n = cache.HtH;
  if (s != Complex(0.0, 0.0)) {
    n += s * cache.HtVZ;
    n += std::conj(s) * cache.HtVZ.adjoint();
    n += std::norm(s) * cache.ZtZ;
  }
  return n;
}

ProjectionResult project_shift(const ArnoldiData& data,
                               const ProjectionCache& cache, Shift sigma_rel,
                               const Vector& x0, const Vector& r0) {
  ProjectionResult out{x0, r0, false};
  if (data.steps == 0) return out;
  const Complex s = sigma_rel.value;
  const DenseMatrix n_sigma = assemble_N_sigma(cache, sigma_rel);
  const Vector vt_r = data.V.adjoint() * r0;
  const Vector zt_r = data.Z.adjoint() * r0;
  const Vector rhs = data.H.adjoint() * vt_r + std::conj(s) * zt_r;
  Vector y;
  try {
    y = hermitian_solve(n_sigma, rhs);
  } catch (const SingularMatrixError&) {
    return out;  // degenerate space for this shift: leave (x0, r0)
  }
  Vector r = r0 - data.V * (data.H * y) - s * (data.Z * y);
  if (r.norm() > r0.norm()) return out;  // minimum-residual guard
  out.x = x0 + data.Z * y;
  out.r = std::move(r);
  out.applied = true;
  return out;
}

std::vector<ProjectionResult> project_shift_batch(
    const ArnoldiData& data, const ProjectionCache& cache,
    const std::vector<Shift>& sigmas_rel, const std::vector<const Vector*>& x0,
    const std::vector<const Vector*>& r0, bool parallel) {
  const Index count = static_cast<Index>(sigmas_rel.size());
  if (x0.size() != sigmas_rel.size() || r0.size() != sigmas_rel.size())
    throw DimensionError("project_shift_batch: ragged inputs");
  std::vector<ProjectionResult> results(static_cast<size_t>(count));
  detail::for_each_index(count, parallel, [&](Index i) {
    results[static_cast<size_t>(i)] =
        project_shift(data, cache, sigmas_rel[static_cast<size_t>(i)],
                      *x0[static_cast<size_t>(i)], *r0[static_cast<size_t>(i)]);
  });
  return results;
}

namespace {

Complex projection_delta(ShiftConvention convention, Complex sigma_l,
                         Complex sigma_base) {
  return convention == ShiftConvention::Relative ? sigma_l - sigma_base : sigma_l;
}

}  // namespace

SolveReport sgmres_solve(ShiftedFamily& family, const Preconditioner& p,
                         const SolveOptions& opts) {
  const Index L = family.size();
  const SparseOperator& op = family.op;
  if (opts.m < 1) throw DimensionError("sgmres_solve: cycle length must be >= 1");

  SolveReport report;
  report.systems.resize(static_cast<size_t>(L));
  OpCounters counters;

  std::vector<double> gamma(static_cast<size_t>(L), 0.0);
  for (Index l = 0; l < L; ++l) {
    SystemReport& sys = report.systems[static_cast<size_t>(l)];
    sys.shift = family.shifts[static_cast<size_t>(l)].value;
    const long before = counters.matvecs;
    if (family.x[static_cast<size_t>(l)].isZero(0.0)) {
      family.r[static_cast<size_t>(l)] = family.b;
    } else {
      family.r[static_cast<size_t>(l)] =
          family.b - spmv(op, family.x[static_cast<size_t>(l)],
                          family.shifts[static_cast<size_t>(l)]);
      counters.matvecs++;
    }
    sys.matvecs += counters.matvecs - before;
    gamma[static_cast<size_t>(l)] = family.r[static_cast<size_t>(l)].norm();
    sys.residual_history.push_back(gamma[static_cast<size_t>(l)] > 0.0 ? 1.0 : 0.0);
    if (gamma[static_cast<size_t>(l)] == 0.0) family.converged[static_cast<size_t>(l)] = 1;
  }

  for (Index base = 0; base < L; ++base) {
    if (family.converged[static_cast<size_t>(base)]) continue;
    SystemReport& base_sys = report.systems[static_cast<size_t>(base)];
    const Shift base_shift = family.shifts[static_cast<size_t>(base)];
    const double abs_tol = opts.eps * gamma[static_cast<size_t>(base)];

    double prev_norm = family.r[static_cast<size_t>(base)].norm();
    while (!family.converged[static_cast<size_t>(base)] &&
           base_sys.cycles < opts.max_cycles) {
      const long mv_before = counters.matvecs;
      const long pc_before = counters.precond_applies;
      CycleOutcome cycle = gmres_cycle(op, base_shift, p, family.b,
                                       family.x[static_cast<size_t>(base)],
                                       family.r[static_cast<size_t>(base)],
                                       opts.m, abs_tol, counters);
      base_sys.matvecs += counters.matvecs - mv_before;
      base_sys.precond_applies += counters.precond_applies - pc_before;
      base_sys.cycles++;
      family.x[static_cast<size_t>(base)] = cycle.x;
      family.r[static_cast<size_t>(base)] = cycle.r;
      const double rel = gamma[static_cast<size_t>(base)] > 0.0
                             ? cycle.r.norm() / gamma[static_cast<size_t>(base)]
                             : 0.0;
      base_sys.residual_history.push_back(rel);
      if (rel <= opts.eps) family.converged[static_cast<size_t>(base)] = 1;

      // Targets: every later unconverged shift gets one projection per cycle.
      std::vector<Index> targets;
      std::vector<Shift> deltas;
      for (Index l = base + 1; l < L; ++l) {
        if (family.converged[static_cast<size_t>(l)]) continue;
        targets.push_back(l);
        deltas.push_back(Shift{projection_delta(opts.convention,
                                                family.shifts[static_cast<size_t>(l)].value,
                                                base_shift.value)});
      }

      CycleEvent event;
      const bool observing = static_cast<bool>(opts.observer);
      if (observing) {
        event.base_index = base;
        event.cycle = base_sys.cycles - 1;
        event.base_shift = base_shift;
        event.arnoldi = &cycle.data;
        event.shift_indices = targets;
        for (const Shift& d : deltas) event.deltas.push_back(d.value);
        for (Index l : targets)
          event.residual_before.push_back(family.r[static_cast<size_t>(l)]);
      }

      if (!targets.empty() && cycle.data.steps > 0) {
        const ProjectionCache cache = build_projection_cache(cycle.data);
        std::vector<const Vector*> x0s, r0s;
        for (Index l : targets) {
          x0s.push_back(&family.x[static_cast<size_t>(l)]);
          r0s.push_back(&family.r[static_cast<size_t>(l)]);
        }
        std::vector<ProjectionResult> results = project_shift_batch(
            cycle.data, cache, deltas, x0s, r0s, opts.parallel_projections);
        for (size_t t = 0; t < targets.size(); ++t) {
          const Index l = targets[t];
          SystemReport& sys = report.systems[static_cast<size_t>(l)];
          if (results[t].applied) {
            family.x[static_cast<size_t>(l)] = std::move(results[t].x);
            family.r[static_cast<size_t>(l)] = std::move(results[t].r);
          } else {
            sys.projection_skipped = true;
          }
          const double rel_l = gamma[static_cast<size_t>(l)] > 0.0
                                   ? family.r[static_cast<size_t>(l)].norm() /
                                         gamma[static_cast<size_t>(l)]
                                   : 0.0;
          sys.residual_history.push_back(rel_l);
          if (rel_l <= opts.eps) family.converged[static_cast<size_t>(l)] = 1;
        }
      }

      if (observing) {
        for (Index l : targets)
          event.residual_after.push_back(family.r[static_cast<size_t>(l)]);
        opts.observer(event);
      }

      // A cycle that made no progress will repeat itself after restart.
      const double now = family.r[static_cast<size_t>(base)].norm();
      if (!family.converged[static_cast<size_t>(base)] &&
          now >= prev_norm * (1.0 - 1e-14))
        break;
      prev_norm = now;
    }
  }

  for (Index l = 0; l < L; ++l) {
    SystemReport& sys = report.systems[static_cast<size_t>(l)];
    sys.converged = family.converged[static_cast<size_t>(l)] != 0;
    report.total_matvecs += sys.matvecs;
    report.total_precond_applies += sys.precond_applies;
  }
  report.all_converged = true;
  for (const SystemReport& sys : report.systems)
    report.all_converged = report.all_converged && sys.converged;
  return report;
}

}  // namespace krylov
