#include "krylov/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace krylov {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

SparseOperator read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path, 0);
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty file", lineno);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError("not a MatrixMarket matrix file", lineno);
  if (lower(format) != "coordinate")
    throw ParseError("only coordinate format is supported", lineno);
  const std::string f = lower(field);
  if (f != "real" && f != "complex")
    throw ParseError("only real or complex fields are supported", lineno);
  if (lower(symmetry) != "general")
    throw ParseError("only general symmetry is supported", lineno);
  const bool complex_field = f == "complex";

  Index nrows = 0, ncols = 0;
  long nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sizes(line);
    if (!(sizes >> nrows >> ncols >> nnz))
      throw ParseError("malformed size line", lineno);
    break;
  }
  if (nnz < 0) throw ParseError("missing size line", lineno);

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(nnz));
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(entry >> i >> j >> re))
      throw ParseError("malformed entry", lineno);
    if (complex_field && !(entry >> im))
      throw ParseError("missing imaginary part", lineno);
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw ParseError("entry index out of range", lineno);
    trips.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1),
                       Complex(re, im));
    ++seen;
  }
  if (seen != nnz)
    throw ParseError("entry count does not match header", lineno);
  SparseOperator op = from_triplets(nrows, ncols, std::move(trips));
  op.validate();
  return op;
}

void write_matrix_market(const SparseOperator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file " + path, 0);
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << op.nrows << ' ' << op.ncols << ' ' << op.nnz() << '\n';
  char buf[96];
  for (Index i = 0; i < op.nrows; ++i) {
    for (Index p = op.row_ptr[static_cast<size_t>(i)];
         p < op.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g %.17g\n",
                    static_cast<long long>(i + 1),
                    static_cast<long long>(op.col_idx[static_cast<size_t>(p)] + 1),
                    op.values[static_cast<size_t>(p)].real(),
                    op.values[static_cast<size_t>(p)].imag());
      out << buf;
    }
  }
}

SparseOperator qcd_base_matrix(const SparseOperator& D, double kappa_c) {
  if (D.nrows != D.ncols)
    throw DimensionError("qcd_base_matrix: square matrix required");
  if (!(kappa_c > 0.0))
    throw DimensionError("qcd_base_matrix: kappa_c must be positive");
  const Complex c(1.0 / kappa_c + 1e-3, 0.0);
  std::vector<Triplet> trips;
  trips.reserve(D.values.size() + static_cast<size_t>(D.nrows));
  for (Index i = 0; i < D.nrows; ++i)
    for (Index p = D.row_ptr[static_cast<size_t>(i)];
         p < D.row_ptr[static_cast<size_t>(i) + 1]; ++p)
      trips.emplace_back(i, D.col_idx[static_cast<size_t>(p)],
                         -D.values[static_cast<size_t>(p)]);
  for (Index i = 0; i < D.nrows; ++i) trips.emplace_back(i, i, c);
  return from_triplets(D.nrows, D.ncols, std::move(trips));
}

std::vector<Vector> rhs_sequence(Index n, Index count, std::uint64_t seed,
                                 bool complex_increments) {
  if (count < 1) throw DimensionError("rhs_sequence: count must be >= 1");
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(count));
  out.push_back(Vector::Constant(n, Complex(1.0, 0.0)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 1; i < count; ++i) {
    Vector d(n);
    for (Index j = 0; j < n; ++j) {
      const double re = gauss(rng);
      const double im = complex_increments ? gauss(rng) : 0.0;
      d[j] = Complex(re, im);
    }
    d *= 0.1 / d.norm();
    out.push_back(out.back() + d);
  }
  return out;
}

SparseOperator synthetic_convdiff(Index nx, double peclet, double rotation) {
  if (nx < 3) throw DimensionError("synthetic_convdiff: nx must be >= 3");
  const Index n = nx * nx;
  const Complex rot = std::polar(1.0, rotation);
  const Complex diag = rot * 4.0;
  const Complex low = rot * Complex(-1.0 - peclet / 2.0, 0.0);
  const Complex high = rot * Complex(-1.0 + peclet / 2.0, 0.0);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(5 * n));
  auto id = [nx](Index i, Index j) { return i * nx + j; };
  for (Index i = 0; i < nx; ++i) {
    for (Index j = 0; j < nx; ++j) {
      const Index row = id(i, j);
      trips.emplace_back(row, row, diag);
      if (i > 0) trips.emplace_back(row, id(i - 1, j), low);
      if (i + 1 < nx) trips.emplace_back(row, id(i + 1, j), high);
      if (j > 0) trips.emplace_back(row, id(i, j - 1), low);
      if (j + 1 < nx) trips.emplace_back(row, id(i, j + 1), high);
    }
  }
  return from_triplets(n, n, std::move(trips));
}

ProblemInstance make_problem(SparseOperator op, Vector b,
                             std::vector<Shift> shifts, std::string label) {
  op.validate();
  if (b.size() != op.nrows)
    throw DimensionError("make_problem: right-hand side dimension mismatch");
  if (b.isZero(0.0)) throw InvariantError("make_problem: b must be nonzero");
  for (const Shift& s : shifts)
    if (!is_finite(s.value)) throw InvariantError("make_problem: non-finite shift");
  return ProblemInstance{std::move(op), std::move(b), std::move(shifts),
                         std::move(label)};
}

FixtureMeta read_fixture_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open fixture metadata " + path, 0);
  nlohmann::json j;
  in >> j;
  FixtureMeta meta;
  meta.name = j.value("name", "");
  if (j.contains("kappa_c") && !j["kappa_c"].is_null())
    meta.kappa_c = j["kappa_c"].get<double>();
  if (j.contains("norm1_range")) {
    meta.norm1_lo = j["norm1_range"][0].get<double>();
    meta.norm1_hi = j["norm1_range"][1].get<double>();
  }
  if (j.contains("norm2_range")) {
    meta.norm2_lo = j["norm2_range"][0].get<double>();
    meta.norm2_hi = j["norm2_range"][1].get<double>();
  }
  return meta;
}

void write_fixture_meta(const FixtureMeta& meta, const std::string& path) {
  nlohmann::json j;
  j["name"] = meta.name;
  if (meta.kappa_c > 0.0)
    j["kappa_c"] = meta.kappa_c;
  else
    j["kappa_c"] = nullptr;
  j["norm1_range"] = {meta.norm1_lo, meta.norm1_hi};
  j["norm2_range"] = {meta.norm2_lo, meta.norm2_hi};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file " + path, 0);
  out << j.dump(2) << '\n';
}

}  // namespace krylov
