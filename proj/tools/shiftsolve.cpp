#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krylov/cost_model.hpp"
#include "krylov/runner.hpp"

#ifdef SHIFTSOLVE_WITH_FETCH
#include <cstdlib>
#endif

namespace {

using namespace krylov;

std::vector<Complex> parse_shift_list(const std::string& text) {
  std::vector<Complex> shifts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) shifts.push_back(parse_complex(item));
  return shifts;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  for (const std::string& item : split_list(text)) out.push_back(std::stoll(item));
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

struct CommonArgs {
  std::string method = "sgmres";
  Index m = 30;
  Index k = 0;
  double eps = 1e-8;
  Index max_cycles = 200;
  std::string shifts = "0.01,0.02,0.03,1,2,3";
  std::string matrix;
  std::string synthetic;
  double kappa_c = 0.0;
  Index members = 1;
  std::string precond = "none";
  std::uint64_t seed = 0;
  std::string convention = "relative";
  bool parallel = false;
  bool real_increments = false;
  int repeats = 3;
  std::string out;
};

void add_common(CLI::App* app, CommonArgs& args) {
  app->add_option("--method", args.method, "sgmres | srgmres | seq-gmres | seq-rgmres");
  app->add_option("--m", args.m, "cycle length");
  app->add_option("--k", args.k, "recycle space dimension");
  app->add_option("--eps", args.eps, "relative residual tolerance");
  app->add_option("--max-cycles", args.max_cycles, "cycle budget per system");
  app->add_option("--shifts", args.shifts, "comma list, complex as a+bi");
  app->add_option("--matrix", args.matrix, "MatrixMarket file(s), comma separated");
  app->add_option("--synthetic", args.synthetic,
                  "nx,peclet,rot for the convection-diffusion generator");
  app->add_option("--kappa-c", args.kappa_c,
                  "kappa_c override for the lattice base-matrix transform");
  app->add_option("--members", args.members, "synthetic sequence length");
  app->add_option("--precond", args.precond, "none | ilu0");
  app->add_option("--seed", args.seed, "random seed for the rhs sequence");
  app->add_option("--shift-convention", args.convention, "relative | absolute");
  app->add_flag("--parallel-shift-projections", args.parallel,
                "project shifted systems concurrently");
  app->add_flag("--real-increments", args.real_increments,
                "use real rhs increments");
  app->add_option("--repeats", args.repeats, "timing repeats (median)");
  app->add_option("--out", args.out, "output file (default stdout)");
}

RunConfig to_config(const CommonArgs& args) {
  RunConfig config;
  if (args.method == "sgmres")
    config.method = Method::Sgmres;
  else if (args.method == "srgmres")
    config.method = Method::Srgmres;
  else if (args.method == "seq-gmres")
    config.method = Method::SeqGmres;
  else if (args.method == "seq-rgmres")
    config.method = Method::SeqRgmres;
  else
    throw std::runtime_error("unknown method " + args.method);
  config.m = args.m;
  config.k = args.k;
  config.eps = args.eps;
  config.max_cycles = args.max_cycles;
  config.shifts = parse_shift_list(args.shifts);
  if (!args.matrix.empty()) config.matrix_paths = split_list(args.matrix);
  if (!args.synthetic.empty()) {
    const std::vector<std::string> parts = split_list(args.synthetic);
    if (parts.size() != 3)
      throw std::runtime_error("--synthetic expects nx,peclet,rot");
    config.nx = std::stoll(parts[0]);
    config.peclet = std::stod(parts[1]);
    config.rotation = std::stod(parts[2]);
  }
  config.kappa_c = args.kappa_c;
  config.sequence_count = args.members;
  if (args.precond == "ilu0")
    config.precond = PrecondKind::Ilu0;
  else if (args.precond != "none")
    throw std::runtime_error("unknown preconditioner " + args.precond);
  config.seed = args.seed;
  if (args.convention == "absolute")
    config.convention = ShiftConvention::Absolute;
  else if (args.convention != "relative")
    throw std::runtime_error("unknown shift convention " + args.convention);
  config.parallel_projections = args.parallel;
  config.real_rhs_increments = args.real_increments;
  config.repeats = args.repeats;
  return config;
}

int cmd_solve(const CommonArgs& args) {
  const RunConfig config = to_config(args);
  const RunOutcome outcome = run_solve(config);
  write_output(args.out, report_json(config, outcome));
  return outcome.report.all_converged ? 0 : 2;
}

int cmd_sweep(const CommonArgs& args, const std::string& grid_m,
              const std::string& grid_k, Index mk_sum, bool marginal) {
  const RunConfig config = to_config(args);
  SweepGrid grid;
  if (!grid_m.empty()) grid.ms = parse_index_list(grid_m);
  if (!grid_k.empty()) grid.ks = parse_index_list(grid_k);
  if (grid.ms.empty()) grid.ms = {config.m};
  if (grid.ks.empty()) grid.ks = {config.k};
  grid.mk_sum = mk_sum;
  grid.marginal = marginal;
  const std::string csv = run_sweep_csv(config, grid);
  write_output(args.out, csv);
  return csv.find("error:") == std::string::npos ? 0 : 2;
}

int cmd_cost(const std::string& var, const std::string& values_text,
             double m, double k, double L, double n, double jnew,
             bool jnew_model_flag, bool k_half, const std::string& out) {
  CostParams base;
  base.m = m;
  base.k = k;
  base.L = L;
  base.n = n;
  base.j_new = jnew;
  SweepVariable sweep_var;
  if (var == "L")
    sweep_var = SweepVariable::Shifts;
  else if (var == "n")
    sweep_var = SweepVariable::Dimension;
  else if (var == "m")
    sweep_var = SweepVariable::CycleLength;
  else
    throw std::runtime_error("cost sweep variable must be L, n or m");
  std::vector<double> values;
  for (const std::string& item : split_list(values_text))
    values.push_back(std::stod(item));
  if (values.empty()) throw std::runtime_error("no sweep values given");
  write_output(out, cost_sweep_csv(cost_sweep(sweep_var, values, base, k_half,
                                              jnew_model_flag)));
  return 0;
}

int cmd_diagnose(const CommonArgs& args) {
  const RunConfig config = to_config(args);
  const DiagnosticsResult result = run_diagnostics(config);
  if (args.out.empty() || args.out == "-") {
    std::cout << result.decomposition_csv << "\n" << result.history_csv;
  } else {
    write_output(args.out + ".decomp.csv", result.decomposition_csv);
    write_output(args.out + ".history.csv", result.history_csv);
  }
  std::cerr << "max decomposition gap (relative): " << result.max_gap_rel
            << "\n";
  return 0;
}

int cmd_fetch_qcd(const std::string& dir, bool large) {
  const std::vector<std::string> small_set = {
      "conf5_0-4x4-10", "conf5_0-4x4-14", "conf5_0-4x4-18", "conf5_0-4x4-22",
      "conf5_0-4x4-26", "conf6_0-4x4-20", "conf6_0-4x4-30"};
  const std::vector<std::string> large_set = {
      "conf5_4-8x8-05", "conf5_4-8x8-10", "conf5_4-8x8-15", "conf5_4-8x8-20",
      "conf6_0-8x8-20", "conf6_0-8x8-30", "conf6_0-8x8-80"};
  const std::vector<std::string>& names = large ? large_set : small_set;
  std::filesystem::create_directories(dir);
  int failures = 0;
  for (const std::string& name : names) {
    const std::string url =
        "https://suitesparse-collection-website.herokuapp.com/MM/QCD/" + name +
        ".tar.gz";
    const std::string archive = dir + "/" + name + ".tar.gz";
    const std::string cmd = "curl -fsSL -o '" + archive + "' '" + url +
                            "' && tar -xzf '" + archive + "' -C '" + dir +
                            "' --strip-components=1 '" + name + "/" + name +
                            ".mtx'";
    std::cerr << "fetching " << name << "...\n";
    if (std::system(cmd.c_str()) != 0) {
      std::cerr << "failed to fetch " << name << " (no network?)\n";
      failures++;
      continue;
    }
    FixtureMeta meta;
    meta.name = name;
    meta.kappa_c = 0.0;  // fill in from the collection notes before solving
    meta.norm1_lo = 28.0;
    meta.norm1_hi = 31.0;
    meta.norm2_lo = 11.0;
    meta.norm2_hi = 14.0;
    write_fixture_meta(meta, dir + "/" + name + ".mtx.json");
  }
  if (failures == 0) return 0;
  std::cerr << "fetched " << (names.size() - failures) << "/" << names.size()
            << " matrices; kappa_c must be supplied via metadata or "
               "--kappa-c before solving\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted and recycled Krylov solver benchmark harness"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "run one solver configuration");
  add_common(solve, solve_args);

  CommonArgs sweep_args;
  std::string grid_m, grid_k;
  Index mk_sum = 0;
  bool marginal = false;
  CLI::App* sweep = app.add_subcommand("sweep", "grid or marginal-cost sweeps");
  add_common(sweep, sweep_args);
  sweep->add_option("--grid-m", grid_m, "comma list of cycle lengths");
  sweep->add_option("--grid-k", grid_k, "comma list of recycle dimensions");
  sweep->add_option("--mk-sum", mk_sum, "sweep (m,k) pairs with m+k fixed");
  sweep->add_flag("--marginal", marginal, "add shifts one at a time");

  std::string cost_var = "m", cost_values;
  double cost_m = 100, cost_k = 0, cost_L = 5, cost_n = 1e7, cost_j = 1e3;
  bool cost_jnew_model = false, cost_k_half = false;
  std::string cost_out;
  CLI::App* cost = app.add_subcommand("cost", "evaluate the FLOP cost models");
  cost->add_option("--var", cost_var, "sweep variable: L, n or m");
  cost->add_option("--values", cost_values, "comma list of sweep values")
      ->required();
  cost->add_option("--m", cost_m, "cycle length (held constant)");
  cost->add_option("--k", cost_k, "recycle dimension");
  cost->add_option("--L", cost_L, "number of shifts (held constant)");
  cost->add_option("--n", cost_n, "problem dimension (held constant)");
  cost->add_option("--jnew", cost_j, "total iteration count for amortization");
  cost->add_flag("--jnew-model", cost_jnew_model,
                 "take j_new from the iteration-count model");
  cost->add_flag("--k-half", cost_k_half, "use k = m/2");
  cost->add_option("--out", cost_out, "output file (default stdout)");

  CommonArgs diag_args;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "per-cycle projection diagnostics");
  add_common(diagnose, diag_args);

  std::string fetch_dir = "qcd";
  bool fetch_large = false;
  CLI::App* fetch = app.add_subcommand("fetch-qcd",
                                       "download the lattice matrix sets");
  fetch->add_option("--dir", fetch_dir, "target directory");
  fetch->add_flag("--large", fetch_large, "fetch the 49152-dim set");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (sweep->parsed())
      return cmd_sweep(sweep_args, grid_m, grid_k, mk_sum, marginal);
    if (cost->parsed())
      return cmd_cost(cost_var, cost_values, cost_m, cost_k, cost_L, cost_n,
                      cost_j, cost_jnew_model, cost_k_half, cost_out);
    if (diagnose->parsed()) return cmd_diagnose(diag_args);
    if (fetch->parsed()) return cmd_fetch_qcd(fetch_dir, fetch_large);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
