#include "hwas/splinebasis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hwas/errors.hpp"

namespace hwas {

std::size_t BasisSpec::n_cols() const {
  if (kind == BasisKind::BSpline)
    return internal_knots.size() + static_cast<std::size_t>(degree) + 1;
  return internal_knots.size() + 2;
}

void BasisSpec::validate() const {
  if (!(lo < hi)) throw Error(Errc::InvalidInput, "basis boundaries must satisfy lo < hi");
  if (kind == BasisKind::BSpline && degree < 0)
    throw Error(Errc::InvalidInput, "B-spline degree must be >= 0");
  double prev = lo;
  for (double k : internal_knots) {
    if (!(k > lo && k < hi))
      throw Error(Errc::InvalidInput, "internal knot outside open boundary interval");
    if (!(k >= prev)) throw Error(Errc::InvalidInput, "internal knots must be sorted");
    prev = k;
  }
}

namespace {

// Cox-de Boor evaluation of all degree+1 basis functions that are nonzero
// at x, on the clamped knot vector (boundaries repeated degree+1 times).
// Piegl & Tiller "basis funs" recursion.
void bspline_row(const BasisSpec& spec, double x, double* out) {
  const int deg = spec.degree;
  const std::size_t nb = spec.n_cols();

  if (x < spec.lo || x > spec.hi) {
    if (!spec.clamp)
      throw Error(Errc::OutOfDomain, "B-spline evaluation outside [lo, hi]");
    x = std::clamp(x, spec.lo, spec.hi);
  }

  // knot vector t[0 .. nb+deg]
  std::vector<double> t(nb + deg + 1);
  for (int i = 0; i <= deg; ++i) t[i] = spec.lo;
  for (std::size_t i = 0; i < spec.internal_knots.size(); ++i) t[deg + 1 + i] = spec.internal_knots[i];
  for (int i = 0; i <= deg; ++i) t[nb + i] = spec.hi;

  // span index: largest i in [deg, nb-1] with t[i] <= x (right-closed at hi)
  std::size_t span = deg;
  while (span + 1 < nb && x >= t[span + 1]) ++span;

  std::vector<double> N(deg + 1), left(deg + 1), right(deg + 1);
  N[0] = 1.0;
  for (int j = 1; j <= deg; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }

  std::memset(out, 0, sizeof(double) * nb);
  for (int r = 0; r <= deg; ++r) out[span - deg + r] = N[r];
}

// Natural cubic spline basis in the truncated-power form: {1, x,
// d_j(x) - d_{K-1}(x)} over the K = k+2 knots (boundaries included). The
// cubic terms cancel beyond the outer knots, so extrapolation is linear and
// the second derivative vanishes at both boundaries by construction.
void natural_row(const BasisSpec& spec, double x, double* out) {
  std::vector<double> knots;
  knots.reserve(spec.internal_knots.size() + 2);
  knots.push_back(spec.lo);
  knots.insert(knots.end(), spec.internal_knots.begin(), spec.internal_knots.end());
  knots.push_back(spec.hi);
  const std::size_t K = knots.size();

  auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  auto d = [&](std::size_t j) {
    return (cube_plus(x - knots[j]) - cube_plus(x - knots[K - 1])) / (knots[K - 1] - knots[j]);
  };

  out[0] = 1.0;
  out[1] = x;
  const double d_last = d(K - 2);
  for (std::size_t j = 0; j + 2 < K; ++j) out[j + 2] = d(j) - d_last;
}

}  // namespace

void basis_row(const BasisSpec& spec, double x, double* out) {
  if (spec.kind == BasisKind::BSpline)
    bspline_row(spec, x, out);
  else
    natural_row(spec, x, out);
}

la::Matrix basis_eval(const BasisSpec& spec, const std::vector<double>& x) {
  spec.validate();
  la::Matrix m(x.size(), spec.n_cols());
  for (std::size_t i = 0; i < x.size(); ++i) basis_row(spec, x[i], m.row(i));
  return m;
}

std::vector<double> log_lag_knots(int max_lag, int k) {
  if (max_lag < 1) throw Error(Errc::InvalidInput, "max_lag must be >= 1");
  if (k < 0) throw Error(Errc::InvalidInput, "knot count must be >= 0");
  std::vector<double> knots(k);
  for (int i = 1; i <= k; ++i)
    knots[i - 1] = std::pow(static_cast<double>(max_lag), static_cast<double>(i) / (k + 1));
  return knots;
}

}  // namespace hwas
