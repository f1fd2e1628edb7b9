#pragma once

#include <string>
#include <vector>

#include "krylov/types.hpp"

namespace krylov {

/// Parameters of the per-iteration FLOP estimates. j_new (total iterations)
/// only enters the amortized one-time terms of the recycling variant.
struct CostParams {
  double m = 0;
  double k = 0;
  double L = 0;
  double n = 0;
  double j_new = 1;
};

/// Extra per-iteration FLOPs of shifted GMRES over plain GMRES,
/// the closed-form polynomial.
double d_sgmres(const CostParams& p);

/// Same quantity re-derived by summing the per-cycle cost line items and
/// dividing by the cycle length; second route for cross-checking.
double d_sgmres_from_items(const CostParams& p);

/// Extra per-iteration FLOPs of shifted Recycled GMRES over Recycled GMRES,
/// the closed-form expression including the 1/m and 1/j_new amortized terms.
double d_srgmres(const CostParams& p);

/// Line-item route: per-cycle table sum / m + one-time table sum / j_new.
double d_srgmres_from_items(const CostParams& p);

/// The printed specialization for k = m/2 (p.k is ignored).
double d_srgmres_half_k(const CostParams& p);

/// Splits a cost expression d(j_new) = constant + coefficient / j_new into
/// its two coefficients by evaluating at two j values.
struct AmortizedSplit {
  double constant = 0;
  double per_jnew = 0;
};
AmortizedSplit split_amortized(const CostParams& p,
                               double (*fn)(const CostParams&));

/// Iteration-count model j_new(n, m) = n / 10^{(4/9 + 2m/(9m+9)) log10 n};
/// tends to n^{1/3} as m grows (100 at n = 1e6).
double jnew_model(double n, double m);

enum class SweepVariable { Shifts, Dimension, CycleLength };

struct CostSweepPoint {
  double param = 0;
  double d_sg = 0;
  double d_srg = 0;
};

/// Evaluates both cost models along one free variable, everything else held
/// at `base` (k = m/2 when half_k; j_new from the model when jnew_from_model).
std::vector<CostSweepPoint> cost_sweep(SweepVariable var,
                                       const std::vector<double>& values,
                                       CostParams base, bool half_k,
                                       bool jnew_from_model);

/// CSV with header param,d_sgmres,d_srgmres, 6 significant digits.
std::string cost_sweep_csv(const std::vector<CostSweepPoint>& points);

}  // namespace krylov
