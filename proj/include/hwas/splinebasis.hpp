#pragma once

#include <vector>

#include "hwas/la.hpp"

namespace hwas {

enum class BasisKind { BSpline, NaturalCubic };

// One-dimensional spline basis over [lo, hi]. BSpline is the full clamped
// B-spline basis (rows sum to one); NaturalCubic is the natural cubic
// spline space (linear beyond the boundary knots), dimension k+2 for k
// internal knots. Neither carries an explicit intercept column; the model
// designs supply their own where needed.
struct BasisSpec {
  BasisKind kind = BasisKind::BSpline;
  int degree = 3;  // ignored for NaturalCubic (cubic by definition)
  std::vector<double> internal_knots;
  double lo = 0.0;
  double hi = 1.0;
  // BSpline only: clamp out-of-domain points to the boundary instead of
  // raising OutOfDomain. NaturalCubic extrapolates linearly and never errors.
  bool clamp = false;

  std::size_t n_cols() const;
  void validate() const;
};

// Writes one evaluation row (n_cols values) for a single point.
void basis_row(const BasisSpec& spec, double x, double* out);

// Rows = points, columns = basis functions. Row-wise independent: evaluating
// points one at a time gives exactly the same entries.
la::Matrix basis_eval(const BasisSpec& spec, const std::vector<double>& x);

// Internal lag knots equally spaced in log scale between lag 1 and max_lag:
// max_lag^(i/(k+1)) for i = 1..k.
std::vector<double> log_lag_knots(int max_lag, int k);

}  // namespace hwas
