#include "krylov/cost_model.hpp"

#include <cmath>
#include <cstdio>

namespace krylov {

namespace {

void check_params(const CostParams& p, bool need_j) {
  if (p.m <= 0 || p.L < 0 || p.n <= 0 || p.k < 0)
    throw DimensionError("cost model: parameters must be positive");
  if (need_j && p.j_new <= 0)
    throw DimensionError("cost model: j_new must be positive");
}

}  // namespace

double d_sgmres(const CostParams& p) {
  check_params(p, false);
  const double m = p.m, L = p.L, n = p.n;
  return (2.0 / 3.0) * (L + 3.0) * m * m + 2.0 * m * (2.0 * L + n + 1.0) +
         6.0 * L * n + n;
}

double d_sgmres_from_items(const CostParams& p) {
  check_params(p, false);
  const double m = p.m, L = p.L, n = p.n;
  const double once = 2.0 * (m * m * m + m * m)   // H^H H and H^H (V^H Z)
                      + n * (m * m + m)           // V^H Z
                      + n * m * m;                // Z^H Z
  const double per_shift = 3.0 * m * m            // sum of four m x m blocks
                           + 2.0 * n * m          // rhs assembly
                           + (2.0 / 3.0) * m * m * m + m * m  // solve with N
                           + 2.0 * m * n          // solution update
                           + 2.0 * m * n;         // residual update
  return (once + L * per_shift) / m;
}

double d_srgmres(const CostParams& p) {
  check_params(p, true);
  const double m = p.m, k = p.k, L = p.L, n = p.n, j = p.j_new;
  double d = (1.0 + 5.0 * L / 3.0) * m * m;
  d += (2.0 + 3.0 * k + 3.0 * L + 5.0 * k * L + 2.0 * n) * m;
  d += 1.0 + 4.0 * k + 3.0 * k * k + 4.0 * L + 6.0 * k * L + 5.0 * k * k * L +
       n + 3.0 * k * n + 6.0 * L * n;
  d += (1.0 / m) * (5.0 * k * k * k * L / 3.0 + k * k * k + 3.0 * k * k * L +
                    2.0 * k * k * n + 2.0 * k * k + 6.0 * k * L * n +
                    4.0 * k * L + k * n + k);
  d += (k * k * k + 2.0 * k * k * n + (k * k * k + 2.0 * k * k / 3.0) * L +
        6.0 * k * L * n + 3.0 * k * L) /
       j;
  return d;
}

double d_srgmres_from_items(const CostParams& p) {
  check_params(p, true);
  const double m = p.m, k = p.k, L = p.L, n = p.n, j = p.j_new;
  const double s = m + k;
  const double s1 = m + k + 1.0;
  const double once = s1 * s1 * s                  // G^H G
                      + 2.0 * k * k * n            // Zu^H Zu and C^H Zu
                      + 2.0 * k * n * m            // Zu^H Z and C^H Z
                      + m * m * n                  // Z^H Z
                      + k * n * (m + 1.0)          // V^H Zu
                      + n * m * (m + 1.0);         // V^H Z
  const double per_shift = s1 * s1 * s             // shifted image assembly
                           + 3.0 * s               // sum of four blocks
                           + 2.0 * s * n           // rhs assembly
                           + (2.0 / 3.0) * s * s * s + s * s  // solve with N
                           + 2.0 * s * n           // solution update
                           + 2.0 * s * n;          // residual update
  const double per_cycle = once + L * per_shift;

  const double onetime = k * k * k                 // Zu <- Zu R^{-1}
                         + 2.0 * k * k * n         // C^H Zu and Zu^H Zu
                         + L * (3.0 * k            // sum of four k x k blocks
                                + 2.0 * k * n      // rhs assembly
                                + k * k * k + (2.0 / 3.0) * k * k  // solve
                                + 2.0 * k * n      // solution update
                                + 2.0 * k * n);    // residual update
  return per_cycle / m + onetime / j;
}

double d_srgmres_half_k(const CostParams& p) {
  check_params(p, true);
  const double m = p.m, L = p.L, n = p.n, j = p.j_new;
  double d = m * m * m * (L / (8.0 * j) + 1.0 / (8.0 * j));
  d += m * m * (L / (6.0 * j) + 45.0 * L / 8.0 + n / (2.0 * j) + 27.0 / 8.0);
  d += m * (3.0 * L * n / j + 3.0 * L / (2.0 * j) + 27.0 * L / 4.0 + 4.0 * n +
            9.0 / 2.0);
  d += 3.0 / 2.0 + 6.0 * L + 3.0 * n / 2.0 + 9.0 * L * n;
  return d;
}

AmortizedSplit split_amortized(const CostParams& p,
                               double (*fn)(const CostParams&)) {
  CostParams a = p, b = p;
  a.j_new = 1.0;
  b.j_new = 2.0;
  const double fa = fn(a), fb = fn(b);
  AmortizedSplit out;
  out.per_jnew = 2.0 * (fa - fb);
  out.constant = fa - out.per_jnew;
  return out;
}

double jnew_model(double n, double m) {
  if (n <= 1.0 || m <= 0) throw DimensionError("jnew_model: invalid parameters");
  const double expo = (4.0 / 9.0 + 2.0 * m / (9.0 * m + 9.0)) * std::log10(n);
  return n / std::pow(10.0, expo);
}

std::vector<CostSweepPoint> cost_sweep(SweepVariable var,
                                       const std::vector<double>& values,
                                       CostParams base, bool half_k,
                                       bool jnew_from_model) {
  std::vector<CostSweepPoint> out;
  out.reserve(values.size());
  for (double v : values) {
    CostParams p = base;
    switch (var) {
      case SweepVariable::Shifts: p.L = v; break;
      case SweepVariable::Dimension: p.n = v; break;
      case SweepVariable::CycleLength: p.m = v; break;
    }
    if (half_k) p.k = p.m / 2.0;
    if (jnew_from_model) p.j_new = jnew_model(p.n, p.m);
    CostSweepPoint pt;
    pt.param = v;
    pt.d_sg = d_sgmres(p);
    pt.d_srg = half_k ? d_srgmres_half_k(p) : d_srgmres(p);
    out.push_back(pt);
  }
  return out;
}

std::string cost_sweep_csv(const std::vector<CostSweepPoint>& points) {
  std::string csv = "param,d_sgmres,d_srgmres\n";
  char buf[128];
  for (const CostSweepPoint& pt : points) {
    std::snprintf(buf, sizeof(buf), "%.5e,%.5e,%.5e\n", pt.param, pt.d_sg,
                  pt.d_srg);
    csv += buf;
  }
  return csv;
}

}  // namespace krylov
