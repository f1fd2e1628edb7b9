#include "krylov/shifted_rgmres.hpp"

#include <cmath>

#include "krylov/detail/parallel.hpp"
#include "krylov/kernels.hpp"

namespace krylov {

AugmentedProjectionCache build_aug_projection_cache(
    const AugmentedArnoldiData& data, const RecycleSpace& rspace) {
  const Index k = rspace.k();
  const Index m = data.steps;
  AugmentedProjectionCache cache;
  cache.G = data.G;
  DenseMatrix gtg = data.G.adjoint() * data.G;
  cache.GtG = (gtg + gtg.adjoint()) * 0.5;

  cache.cross1 = DenseMatrix::Zero(k + m + 1, k + m);
  if (k > 0) {
    cache.cross1.topLeftCorner(k, k) = rspace.C.adjoint() * rspace.Zu;
    cache.cross1.topRightCorner(k, m) = rspace.C.adjoint() * data.Z;
    cache.cross1.bottomLeftCorner(m + 1, k) = data.V.adjoint() * rspace.Zu;
  }
  cache.cross1.bottomRightCorner(m + 1, m) = data.V.adjoint() * data.Z;

  cache.zgram = DenseMatrix::Zero(k + m, k + m);
  if (k > 0) {
    cache.zgram.topLeftCorner(k, k) = rspace.Zu.adjoint() * rspace.Zu;
    cache.zgram.topRightCorner(k, m) = rspace.Zu.adjoint() * data.Z;
    cache.zgram.bottomLeftCorner(m, k) = cache.zgram.topRightCorner(k, m).adjoint();
  }
  cache.zgram.bottomRightCorner(m, m) = data.Z.adjoint() * data.Z;
  cache.zgram = ((cache.zgram + cache.zgram.adjoint()) * 0.5).eval();

  cache.Gt_cross = data.G.adjoint() * cache.cross1;
  return cache;
}

DenseMatrix assemble_N_sigma_aug(const AugmentedProjectionCache& cache,
                                 Shift sigma) {
  const Complex s = sigma.value;
  DenseMatrix n = cache.GtG;
  if (s != Complex(0.0, 0.0)) {
    n += s * cache.Gt_cross;
    n += std::conj(s) * cache.Gt_cross.adjoint();
    n += std::norm(s) * cache.zgram;
  }
  return n;
}

Vector aug_projection_rhs_full(const AugmentedArnoldiData& data,
                               const RecycleSpace& rspace,
                               const AugmentedProjectionCache& cache,
                               Shift sigma_rel, const Vector& r0) {
  const Index k = rspace.k();
  const Index m = data.steps;
  Vector stacked(k + m + 1);
  if (k > 0) stacked.head(k) = rspace.C.adjoint() * r0;
  stacked.tail(m + 1) = data.V.adjoint() * r0;
  Vector rhs = cache.G.adjoint() * stacked;
  if (sigma_rel.value != Complex(0.0, 0.0)) {
    Vector zstack(k + m);
    if (k > 0) zstack.head(k) = rspace.Zu.adjoint() * r0;
    zstack.tail(m) = data.Z.adjoint() * r0;
    rhs += std::conj(sigma_rel.value) * zstack;
  }
  return rhs;
}

Vector aug_projection_rhs_simplified(const AugmentedArnoldiData& data,
                                     const RecycleSpace& rspace,
                                     Shift sigma_rel, const Vector& r0) {
  const Index k = rspace.k();
  const Index m = data.steps;
  Vector rhs = Vector::Zero(k + m);
  Vector tail = data.H.adjoint() * (data.V.adjoint() * r0);
  if (k > 0) tail += data.B.adjoint() * (rspace.C.adjoint() * r0);
  if (sigma_rel.value != Complex(0.0, 0.0))
    tail += std::conj(sigma_rel.value) * (data.Z.adjoint() * r0);
  rhs.tail(m) = tail;
  return rhs;
}

ProjectionResult project_shift_aug(const AugmentedArnoldiData& data,
                                   const RecycleSpace& rspace,
                                   const AugmentedProjectionCache& cache,
                                   Shift sigma_rel, const Vector& x0,
                                   const Vector& r0) {
  ProjectionResult out{x0, r0, false};
  const Index k = rspace.k();
  const Index m = data.steps;
  if (k + m == 0) return out;
  const Complex s = sigma_rel.value;
  const DenseMatrix n_sigma = assemble_N_sigma_aug(cache, sigma_rel);
  const Vector rhs = aug_projection_rhs_simplified(data, rspace, sigma_rel, r0);
  Vector y;
  try {
    y = hermitian_solve(n_sigma, rhs);
  } catch (const SingularMatrixError&) {
    return out;
  }
  const Vector gy = cache.G * y;
  Vector r = r0 - data.V * gy.tail(m + 1);
  if (k > 0) r -= rspace.C * gy.head(k);
  if (s != Complex(0.0, 0.0)) {
    r -= s * (data.Z * y.tail(m));
    if (k > 0) r -= s * (rspace.Zu * y.head(k));
  }
  if (r.norm() > r0.norm()) return out;
  Vector x = x0 + data.Z * y.tail(m);
  if (k > 0) x += rspace.Zu * y.head(k);
  out.x = std::move(x);
  out.r = std::move(r);
  out.applied = true;
  return out;
}

std::vector<ProjectionResult> project_shift_aug_batch(
    const AugmentedArnoldiData& data, const RecycleSpace& rspace,
    const AugmentedProjectionCache& cache, const std::vector<Shift>& sigmas_rel,
    const std::vector<const Vector*>& x0, const std::vector<const Vector*>& r0,
    bool parallel) {
  const Index count = static_cast<Index>(sigmas_rel.size());
  if (x0.size() != sigmas_rel.size() || r0.size() != sigmas_rel.size())
    throw DimensionError("project_shift_aug_batch: ragged inputs");
  std::vector<ProjectionResult> results(static_cast<size_t>(count));
  detail::for_each_index(count, parallel, [&](Index i) {
    results[static_cast<size_t>(i)] = project_shift_aug(
        data, rspace, cache, sigmas_rel[static_cast<size_t>(i)],
        *x0[static_cast<size_t>(i)], *r0[static_cast<size_t>(i)]);
  });
  return results;
}

RecycleProjectionCache build_recycle_projection_cache(const RecycleSpace& rspace) {
  RecycleProjectionCache cache;
  cache.CtZu = rspace.C.adjoint() * rspace.Zu;
  DenseMatrix zz = rspace.Zu.adjoint() * rspace.Zu;
  cache.ZutZu = (zz + zz.adjoint()) * 0.5;
  return cache;
}

ProjectionResult initial_shift_projection(const RecycleSpace& rspace,
                                          const RecycleProjectionCache& cache,
                                          Shift sigma_rel, const Vector& x_prev,
                                          const Vector& r_prev) {
  ProjectionResult out{x_prev, r_prev, false};
  const Index k = rspace.k();
  if (k == 0) return out;
  const Complex s = sigma_rel.value;
  DenseMatrix n = DenseMatrix::Identity(k, k);
  if (s != Complex(0.0, 0.0)) {
    n += s * cache.CtZu;
    n += std::conj(s) * cache.CtZu.adjoint();
    n += std::norm(s) * cache.ZutZu;
  }
  Vector rhs = rspace.C.adjoint() * r_prev;
  if (s != Complex(0.0, 0.0)) rhs += std::conj(s) * (rspace.Zu.adjoint() * r_prev);
  Vector y;
  try {
    y = hermitian_solve(n, rhs);
  } catch (const SingularMatrixError&) {
    return out;
  }
  Vector r = r_prev - rspace.C * y;
  if (s != Complex(0.0, 0.0)) r -= s * (rspace.Zu * y);
  if (r.norm() > r_prev.norm()) return out;
  out.x = x_prev + rspace.Zu * y;
  out.r = std::move(r);
  out.applied = true;
  return out;
}

ProjectionResult initial_shift_projection(const RecycleSpace& rspace,
                                          Shift sigma_rel, const Vector& x_prev,
                                          const Vector& r_prev) {
  return initial_shift_projection(rspace, build_recycle_projection_cache(rspace),
                                  sigma_rel, x_prev, r_prev);
}

namespace {

Complex projection_delta(ShiftConvention convention, Complex sigma_l,
                         Complex sigma_base) {
  return convention == ShiftConvention::Relative ? sigma_l - sigma_base : sigma_l;
}

}  // namespace

std::pair<SolveReport, RecycleSpace> srgmres_solve(ShiftedFamily& family,
                                                   const Preconditioner& p,
                                                   const RecycleSpace& rspace_in,
                                                   const SolveOptions& opts) {
  const Index L = family.size();
  const SparseOperator& op = family.op;
  if (opts.m < 1) throw DimensionError("srgmres_solve: cycle length must be >= 1");

  SolveReport report;
  report.systems.resize(static_cast<size_t>(L));
  OpCounters counters;
  OpCounters setup_counters;

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

  auto rel_norm = [&](Index l) {
    return gamma[static_cast<size_t>(l)] > 0.0
               ? family.r[static_cast<size_t>(l)].norm() / gamma[static_cast<size_t>(l)]
               : 0.0;
  };

  // Bring the supplied recycle space to this operator and base shift.
  RecycleSpace rspace = RecycleSpace::empty_space(op.nrows);
  Complex rspace_base = family.shifts[0].value;
  if (!rspace_in.empty()) {
    rspace = opts.recycle_space_consistent
                 ? rspace_in
                 : rebuild_for_operator(op, family.shifts[0], p, rspace_in.U,
                                        setup_counters);
  }

  // Entry projections: base system against C, remaining shifts against
  // C + sigma Zu.
  auto entry_projections = [&](Index base) {
    if (rspace.empty()) return;
    if (!family.converged[static_cast<size_t>(base)]) {
      auto [x0, r0] = initial_projection(rspace, family.x[static_cast<size_t>(base)],
                                         family.r[static_cast<size_t>(base)]);
      family.x[static_cast<size_t>(base)] = std::move(x0);
      family.r[static_cast<size_t>(base)] = std::move(r0);
      const double rel = rel_norm(base);
      report.systems[static_cast<size_t>(base)].residual_history.push_back(rel);
      if (rel <= opts.eps) family.converged[static_cast<size_t>(base)] = 1;
    }
    const RecycleProjectionCache rcache = build_recycle_projection_cache(rspace);
    for (Index l = base + 1; l < L; ++l) {
      if (family.converged[static_cast<size_t>(l)]) continue;
      const Shift delta{projection_delta(opts.convention,
                                         family.shifts[static_cast<size_t>(l)].value,
                                         family.shifts[static_cast<size_t>(base)].value)};
      ProjectionResult res = initial_shift_projection(
          rspace, rcache, delta, family.x[static_cast<size_t>(l)],
          family.r[static_cast<size_t>(l)]);
      SystemReport& sys = report.systems[static_cast<size_t>(l)];
      if (res.applied) {
        family.x[static_cast<size_t>(l)] = std::move(res.x);
        family.r[static_cast<size_t>(l)] = std::move(res.r);
      } else {
        sys.projection_skipped = true;
      }
      const double rel = rel_norm(l);
      sys.residual_history.push_back(rel);
      if (rel <= opts.eps) family.converged[static_cast<size_t>(l)] = 1;
    }
  };

  entry_projections(0);

  for (Index base = 0; base < L; ++base) {
    if (base > 0 && !rspace.empty()) {
      const Complex here = family.shifts[static_cast<size_t>(base)].value;
      if (here != rspace_base) {
        rspace = rebase_shift(rspace, here - rspace_base);
        rspace_base = here;
        entry_projections(base);
      }
    }
    if (family.converged[static_cast<size_t>(base)]) continue;
    SystemReport& base_sys = report.systems[static_cast<size_t>(base)];
    const Shift base_shift = family.shifts[static_cast<size_t>(base)];
    const double abs_tol = opts.eps * gamma[static_cast<size_t>(base)];

    double prev_norm = family.r[static_cast<size_t>(base)].norm();
    while (!family.converged[static_cast<size_t>(base)] &&
           base_sys.cycles < opts.max_cycles) {
      const long mv_before = counters.matvecs;
      const long pc_before = counters.precond_applies;
      AugCycleOutcome cycle = rgmres_cycle(op, base_shift, p, family.b,
                                           family.x[static_cast<size_t>(base)],
                                           family.r[static_cast<size_t>(base)],
                                           rspace, opts.m, abs_tol, counters);
      base_sys.matvecs += counters.matvecs - mv_before;
      base_sys.precond_applies += counters.precond_applies - pc_before;
      base_sys.cycles++;
      family.x[static_cast<size_t>(base)] = cycle.x;
      family.r[static_cast<size_t>(base)] = cycle.r;
      const double rel = rel_norm(base);
      base_sys.residual_history.push_back(rel);
      if (rel <= opts.eps) family.converged[static_cast<size_t>(base)] = 1;

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
        event.augmented = &cycle.data;
        event.rspace = &rspace;
        event.shift_indices = targets;
        for (const Shift& d : deltas) event.deltas.push_back(d.value);
        for (Index l : targets)
          event.residual_before.push_back(family.r[static_cast<size_t>(l)]);
      }

      if (!targets.empty() && cycle.data.steps + rspace.k() > 0) {
        const AugmentedProjectionCache cache =
            build_aug_projection_cache(cycle.data, rspace);
        std::vector<const Vector*> x0s, r0s;
        for (Index l : targets) {
          x0s.push_back(&family.x[static_cast<size_t>(l)]);
          r0s.push_back(&family.r[static_cast<size_t>(l)]);
        }
        std::vector<ProjectionResult> results =
            project_shift_aug_batch(cycle.data, rspace, cache, deltas, x0s, r0s,
                                    opts.parallel_projections);
        for (size_t t = 0; t < targets.size(); ++t) {
          const Index l = targets[t];
          SystemReport& sys = report.systems[static_cast<size_t>(l)];
          if (results[t].applied) {
            family.x[static_cast<size_t>(l)] = std::move(results[t].x);
            family.r[static_cast<size_t>(l)] = std::move(results[t].r);
          } else {
            sys.projection_skipped = true;
          }
          const double rel_l = rel_norm(l);
          sys.residual_history.push_back(rel_l);
          if (rel_l <= opts.eps) family.converged[static_cast<size_t>(l)] = 1;
        }
      }

      if (observing) {
        for (Index l : targets)
          event.residual_after.push_back(family.r[static_cast<size_t>(l)]);
        opts.observer(event);
      }

      // Space refresh at cycle end (shifted projections used the old space).
      if (opts.k > 0 && cycle.data.steps > 0) {
        SpaceUpdateResult upd = harmonic_ritz_update(cycle.data, rspace, opts.k);
        if (!upd.updated) report.space_update_failures++;
        rspace = std::move(upd.space);
        rspace_base = base_shift.value;
      }

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
  report.setup_matvecs = setup_counters.matvecs;
  report.setup_precond_applies = setup_counters.precond_applies;
  report.all_converged = true;
  for (const SystemReport& sys : report.systems)
    report.all_converged = report.all_converged && sys.converged;
  return {report, rspace};
}

}  // namespace krylov
