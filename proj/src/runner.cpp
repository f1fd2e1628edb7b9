#include "krylov/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "krylov/shifted_core.hpp"

namespace krylov {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double spectral_norm_estimate(const SparseOperator& op, Index iters = 60) {
  Vector v = Vector::Constant(op.ncols, Complex(1.0, 0.0));
  v /= v.norm();
  double s = 0.0;
  for (Index i = 0; i < iters; ++i) {
    Vector w = spmv(op, v);
    // multiply by A^H via the dense-free transpose product
    Vector u = Vector::Zero(op.ncols);
    for (Index row = 0; row < op.nrows; ++row)
      for (Index p = op.row_ptr[static_cast<size_t>(row)];
           p < op.row_ptr[static_cast<size_t>(row) + 1]; ++p)
        u[op.col_idx[static_cast<size_t>(p)]] +=
            std::conj(op.values[static_cast<size_t>(p)]) * w[row];
    const double nn = u.norm();
    if (nn == 0.0) return 0.0;
    s = std::sqrt(nn);
    v = u / nn;
  }
  return s;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Sgmres: return "sgmres";
    case Method::Srgmres: return "srgmres";
    case Method::SeqGmres: return "seq-gmres";
    case Method::SeqRgmres: return "seq-rgmres";
  }
  return "?";
}

SolveOptions make_options(const RunConfig& config) {
  SolveOptions opts;
  opts.m = config.m;
  opts.k = config.k;
  opts.eps = config.eps;
  opts.max_cycles = config.max_cycles;
  opts.convention = config.convention;
  opts.parallel_projections = config.parallel_projections;
  return opts;
}

void merge_member_report(SolveReport& total, const SolveReport& member,
                         const std::string& label) {
  for (SystemReport sys : member.systems) {
    sys.label = label;
    total.systems.push_back(std::move(sys));
  }
  total.total_matvecs += member.total_matvecs;
  total.total_precond_applies += member.total_precond_applies;
  total.setup_matvecs += member.setup_matvecs;
  total.setup_precond_applies += member.setup_precond_applies;
  total.space_update_failures += member.space_update_failures;
}

// Recycle-space state carried across systems and sequence members.
struct RecycleCarry {
  RecycleSpace live = RecycleSpace::empty_space(0);
  Complex live_base{0.0, 0.0};
  bool live_valid = false;   // consistent with the current member's operator
  DenseMatrix carried_U;     // from the previous member; needs a rebuild
};

SolveReport solve_one_member(const RunConfig& config, const FamilyMember& member,
                             const Preconditioner& p, RecycleCarry& carry) {
  std::vector<Shift> shifts;
  shifts.reserve(config.shifts.size());
  for (Complex s : config.shifts) shifts.push_back(Shift{s});
  SolveOptions opts = make_options(config);

  switch (config.method) {
    case Method::Sgmres: {
      ShiftedFamily family = ShiftedFamily::make(member.op, member.b, shifts);
      return sgmres_solve(family, p, opts);
    }
    case Method::Srgmres: {
      ShiftedFamily family = ShiftedFamily::make(member.op, member.b, shifts);
      RecycleSpace rin = RecycleSpace::empty_space(member.op.nrows);
      if (carry.carried_U.cols() > 0) rin.U = carry.carried_U;
      opts.recycle_space_consistent = false;
      auto [report, rout] = srgmres_solve(family, p, rin, opts);
      carry.carried_U = rout.U;
      return report;
    }
    case Method::SeqGmres: {
      SolveReport merged;
      for (const Shift& s : shifts) {
        ShiftedFamily family = ShiftedFamily::make(member.op, member.b, {s});
        merge_member_report(merged, sgmres_solve(family, p, opts), "");
      }
      merged.all_converged = true;
      for (const SystemReport& sys : merged.systems)
        merged.all_converged = merged.all_converged && sys.converged;
      return merged;
    }
    case Method::SeqRgmres: {
      SolveReport merged;
      for (const Shift& s : shifts) {
        ShiftedFamily family = ShiftedFamily::make(member.op, member.b, {s});
        RecycleSpace rin = RecycleSpace::empty_space(member.op.nrows);
        if (carry.live_valid) {
          rin = rebase_shift(carry.live, s.value - carry.live_base);
          opts.recycle_space_consistent = true;
        } else {
          if (carry.carried_U.cols() > 0) rin.U = carry.carried_U;
          opts.recycle_space_consistent = false;
        }
        auto [rep, rout] = srgmres_solve(family, p, rin, opts);
        carry.live = rout;
        carry.live_base = s.value;
        carry.live_valid = true;
        merge_member_report(merged, rep, "");
      }
      merged.all_converged = true;
      for (const SystemReport& sys : merged.systems)
        merged.all_converged = merged.all_converged && sys.converged;
      // Next member sees a different operator: force a rebuild.
      carry.carried_U = carry.live.U;
      carry.live_valid = false;
      return merged;
    }
  }
  throw std::logic_error("unknown method");
}

}  // namespace

Complex smallest_shift(const std::vector<Complex>& shifts) {
  if (shifts.empty()) throw DimensionError("no shifts given");
  Complex best = shifts.front();
  for (Complex s : shifts) {
    const double as = std::abs(s), ab = std::abs(best);
    if (as < ab || (as == ab && s.real() < best.real())) best = s;
  }
  return best;
}

Preconditioner build_preconditioner(const RunConfig& config,
                                    const SparseOperator& op) {
  if (config.precond == PrecondKind::Identity) return Preconditioner::identity();
  const Complex sigma_min =
      config.shifts.empty() ? Complex(0.0, 0.0) : smallest_shift(config.shifts);
  return ilu0_factor(shifted_copy(op, sigma_min));
}

std::vector<FamilyMember> build_members(const RunConfig& config) {
  std::vector<FamilyMember> members;
  if (!config.matrix_paths.empty()) {
    for (const std::string& path : config.matrix_paths) {
      FamilyMember member;
      SparseOperator loaded = read_matrix_market(path);
      double kappa = config.kappa_c;
      FixtureMeta meta;
      const std::string meta_path = path + ".json";
      if (std::filesystem::exists(meta_path)) {
        meta = read_fixture_meta(meta_path);
        if (kappa <= 0.0) kappa = meta.kappa_c;
      }
      member.op = kappa > 0.0 ? qcd_base_matrix(loaded, kappa) : std::move(loaded);
      member.label = std::filesystem::path(path).stem().string();
      if (meta.norm1_hi > 0.0) {
        const double n1 = member.op.norm1();
        if (n1 <= meta.norm1_lo || n1 >= meta.norm1_hi)
          throw InvariantError("matrix 1-norm " + fmt_double(n1) +
                               " outside fixture range for " + member.label);
      }
      if (meta.norm2_hi > 0.0 && member.op.nrows <= 5000) {
        const double n2 = spectral_norm_estimate(member.op);
        if (n2 <= meta.norm2_lo || n2 >= meta.norm2_hi)
          throw InvariantError("matrix 2-norm " + fmt_double(n2) +
                               " outside fixture range for " + member.label);
      }
      members.push_back(std::move(member));
    }
  } else {
    const SparseOperator op =
        synthetic_convdiff(config.nx, config.peclet, config.rotation);
    for (Index i = 0; i < std::max<Index>(1, config.sequence_count); ++i) {
      FamilyMember member;
      member.op = op;
      member.label = "synthetic" + std::to_string(i);
      members.push_back(std::move(member));
    }
  }
  const Index n = members.front().op.nrows;
  for (const FamilyMember& member : members)
    if (member.op.nrows != n)
      throw DimensionError("sequence members must share the dimension");
  const std::vector<Vector> rhs = rhs_sequence(
      n, static_cast<Index>(members.size()), config.seed,
      !config.real_rhs_increments);
  for (size_t i = 0; i < members.size(); ++i) members[i].b = rhs[i];
  return members;
}

RunOutcome run_solve(const RunConfig& config) {
  if (config.shifts.empty()) throw DimensionError("run_solve: no shifts given");
  const std::vector<FamilyMember> members = build_members(config);

  RunOutcome outcome;
  std::vector<double> times;
  const int repeats = std::max(1, config.repeats);
  for (int rep = 0; rep < repeats; ++rep) {
    RunOutcome attempt;
    const auto t0 = std::chrono::steady_clock::now();
    RecycleCarry carry;
    for (const FamilyMember& member : members) {
      const Preconditioner p = build_preconditioner(config, member.op);
      SolveReport rep_member = solve_one_member(config, member, p, carry);
      attempt.member_reports.push_back(rep_member);
      merge_member_report(attempt.report, rep_member, member.label);
    }
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
    if (rep == 0) outcome = std::move(attempt);
  }
  std::sort(times.begin(), times.end());
  outcome.report.wall_seconds = times[times.size() / 2];
  outcome.report.all_converged = true;
  for (const SystemReport& sys : outcome.report.systems)
    outcome.report.all_converged =
        outcome.report.all_converged && sys.converged;
  return outcome;
}

namespace {

nlohmann::json system_json(const SystemReport& sys) {
  nlohmann::json j;
  j["shift"] = {sys.shift.real(), sys.shift.imag()};
  j["matvecs"] = sys.matvecs;
  j["precond_applies"] = sys.precond_applies;
  j["cycles"] = sys.cycles;
  j["converged"] = sys.converged;
  j["projection_skipped"] = sys.projection_skipped;
  j["residual_history"] = sys.residual_history;
  if (!sys.label.empty()) j["member"] = sys.label;
  return j;
}

}  // namespace

std::string report_json(const RunConfig& config, const RunOutcome& outcome) {
  nlohmann::json j;
  j["config"]["method"] = method_name(config.method);
  j["config"]["m"] = config.m;
  j["config"]["k"] = config.k;
  j["config"]["eps"] = config.eps;
  j["config"]["max_cycles"] = config.max_cycles;
  j["config"]["precond"] =
      config.precond == PrecondKind::Identity ? "none" : "ilu0";
  j["config"]["seed"] = config.seed;
  j["config"]["shift_convention"] =
      config.convention == ShiftConvention::Relative ? "relative" : "absolute";
  nlohmann::json shifts = nlohmann::json::array();
  for (Complex s : config.shifts) shifts.push_back({s.real(), s.imag()});
  j["config"]["shifts"] = shifts;
  if (!config.matrix_paths.empty())
    j["config"]["matrices"] = config.matrix_paths;
  else
    j["config"]["synthetic"] = {{"nx", config.nx},
                                {"peclet", config.peclet},
                                {"rotation", config.rotation},
                                {"members", config.sequence_count}};

  nlohmann::json systems = nlohmann::json::array();
  for (const SystemReport& sys : outcome.report.systems)
    systems.push_back(system_json(sys));
  j["systems"] = systems;
  j["totals"]["matvecs"] = outcome.report.total_matvecs;
  j["totals"]["precond_applies"] = outcome.report.total_precond_applies;
  j["totals"]["setup_matvecs"] = outcome.report.setup_matvecs;
  j["totals"]["setup_precond_applies"] = outcome.report.setup_precond_applies;
  j["totals"]["space_update_failures"] = outcome.report.space_update_failures;
  j["totals"]["wall_seconds"] = outcome.report.wall_seconds;
  j["totals"]["all_converged"] = outcome.report.all_converged;
  return j.dump(2) + "\n";
}

std::string run_sweep_csv(const RunConfig& config, const SweepGrid& grid) {
  std::ostringstream csv;
  if (grid.marginal) {
    csv << "nshifts,sigma_re,sigma_im,total_matvecs,setup_matvecs,"
           "delta_matvecs,wall_seconds,all_converged,status\n";
    long prev = 0;
    for (size_t j = 1; j <= config.shifts.size(); ++j) {
      RunConfig sub = config;
      sub.shifts.assign(config.shifts.begin(), config.shifts.begin() + j);
      const Complex added = config.shifts[j - 1];
      csv << j << ',' << fmt_double(added.real()) << ','
          << fmt_double(added.imag()) << ',';
      try {
        RunOutcome out = run_solve(sub);
        const long all_in = out.report.total_matvecs + out.report.setup_matvecs;
        csv << out.report.total_matvecs << ',' << out.report.setup_matvecs
            << ',' << (all_in - prev) << ','
            << fmt_double(out.report.wall_seconds) << ','
            << (out.report.all_converged ? 1 : 0) << ",ok\n";
        prev = all_in;
      } catch (const std::exception& e) {
        csv << "0,0,0,0,0,error:" << e.what() << "\n";
      }
    }
    return csv.str();
  }

  csv << "m,k,total_matvecs,setup_matvecs,total_precond_applies,"
         "wall_seconds,all_converged,status\n";
  std::vector<std::pair<Index, Index>> points;
  if (grid.mk_sum > 0) {
    for (Index k : grid.ks)
      if (k < grid.mk_sum) points.emplace_back(grid.mk_sum - k, k);
  } else {
    for (Index m : grid.ms)
      for (Index k : grid.ks) points.emplace_back(m, k);
  }
  for (auto [m, k] : points) {
    RunConfig sub = config;
    sub.m = m;
    sub.k = k;
    csv << m << ',' << k << ',';
    try {
      RunOutcome out = run_solve(sub);
      csv << out.report.total_matvecs << ',' << out.report.setup_matvecs << ','
          << out.report.total_precond_applies << ','
          << fmt_double(out.report.wall_seconds) << ','
          << (out.report.all_converged ? 1 : 0) << ','
          << (out.report.all_converged ? "ok" : "nonconverged") << "\n";
    } catch (const std::exception& e) {
      csv << "0,0,0,0,0,error:" << e.what() << "\n";
    }
  }
  return csv.str();
}

DiagnosticsResult run_diagnostics(const RunConfig& config) {
  if (config.shifts.empty())
    throw DimensionError("run_diagnostics: no shifts given");
  std::vector<FamilyMember> members = build_members(config);
  const FamilyMember& member = members.front();
  if (member.op.nrows > 5000)
    throw DimensionError("run_diagnostics: problem too large (n <= 5000)");
  const Preconditioner p = build_preconditioner(config, member.op);

  std::vector<Shift> shifts;
  for (Complex s : config.shifts) shifts.push_back(Shift{s});
  ShiftedFamily family = ShiftedFamily::make(member.op, member.b, shifts, {},
                                             /*allow_duplicate_shifts=*/true);

  DiagnosticsResult result;
  std::ostringstream decomp;
  decomp << "cycle,base_sigma_re,base_sigma_im,sigma_re,sigma_im,"
            "pre_norm,post_norm,improvement,term1,term2,gap,gap_rel\n";

  SolveOptions opts = make_options(config);
  opts.observer = [&](const CycleEvent& ev) {
    const ArnoldiData& data = *ev.arnoldi;
    for (size_t t = 0; t < ev.shift_indices.size(); ++t) {
      const Index sys = ev.shift_indices[t];
      const Complex sigma = family.shifts[static_cast<size_t>(sys)].value;
      const Complex delta = ev.deltas[t];
      const double pre = ev.residual_before[t].norm();
      const double post = ev.residual_after[t].norm();
      double term1 = 0.0, term2 = 0.0, gap = 0.0, gap_rel = 0.0;
      if (data.steps >= 2) {
        const Index j = data.steps;
        SearchSpace small;
        small.S = data.Z.leftCols(j - 1);
        small.AS_sigma = data.V.leftCols(j) * data.H.topLeftCorner(j, j - 1) +
                         delta * data.Z.leftCols(j - 1);
        SearchSpace big;
        big.S = data.Z;
        big.AS_sigma = data.V * data.H + delta * data.Z;
        DecompositionCheck check =
            residual_decomposition_check(small, big, ev.residual_before[t]);
        term1 = check.term1_norm;
        term2 = check.term2_norm;
        gap = check.gap;
        gap_rel = pre > 0.0 ? gap / pre : 0.0;
        result.max_gap_rel = std::max(result.max_gap_rel, gap_rel);
      }
      decomp << ev.cycle << ',' << fmt_double(ev.base_shift.value.real()) << ','
             << fmt_double(ev.base_shift.value.imag()) << ','
             << fmt_double(sigma.real()) << ',' << fmt_double(sigma.imag())
             << ',' << fmt_double(pre) << ',' << fmt_double(post) << ','
             << fmt_double(pre > 0.0 ? post / pre : 0.0) << ','
             << fmt_double(term1) << ',' << fmt_double(term2) << ','
             << fmt_double(gap) << ',' << fmt_double(gap_rel) << "\n";
    }
  };

  SolveReport report = sgmres_solve(family, p, opts);
  result.decomposition_csv = decomp.str();

  std::ostringstream hist;
  hist << "system,sigma_re,sigma_im,event,rel_residual\n";
  for (size_t i = 0; i < report.systems.size(); ++i) {
    const SystemReport& sys = report.systems[i];
    for (size_t e = 0; e < sys.residual_history.size(); ++e)
      hist << i << ',' << fmt_double(sys.shift.real()) << ','
           << fmt_double(sys.shift.imag()) << ',' << e << ','
           << fmt_double(sys.residual_history[e]) << "\n";
  }
  result.history_csv = hist.str();
  return result;
}

Complex parse_complex(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ParseError("empty complex literal", 0);
  auto to_double = [](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    size_t used = 0;
    const double v = std::stod(part, &used);
    if (used != part.size()) throw ParseError("malformed number", 0);
    return v;
  };
  if (s.back() != 'i' && s.back() != 'I') {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("malformed complex literal", 0);
    return Complex(v, 0.0);
  }
  s.pop_back();
  // Split at the last +/- that is not an exponent sign and not leading.
  size_t split = std::string::npos;
  for (size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return Complex(0.0, to_double(s));
  const double re = to_double(s.substr(0, split));
  const double im = to_double(s.substr(split));
  return Complex(re, im);
}

}  // namespace krylov
