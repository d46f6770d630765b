#pragma once

#include <string>
#include <vector>

#include "hwas/estimates.hpp"
#include "hwas/la.hpp"
#include "hwas/splinebasis.hpp"

namespace hwas {

// Exposure x lag tensor basis. The exposure dimension is a B-spline over the
// observed temperature range; the lag dimension is a natural cubic spline
// over [0, max_lag] with log-spaced internal knots. max_lag = 0 degenerates
// to the exposure basis alone (lag dimension = scalar 1).
struct CrossBasisSpec {
  BasisSpec exposure;
  BasisSpec lag;
  int max_lag = 3;

  std::size_t lag_cols() const { return max_lag == 0 ? 1 : lag.n_cols(); }
  std::size_t n_cols() const { return exposure.n_cols() * lag_cols(); }
  void validate() const;
};

// Spec plus the lag basis evaluated at the integer lags, shared by row
// construction and prediction.
class CrossBasis {
 public:
  explicit CrossBasis(CrossBasisSpec spec);

  const CrossBasisSpec& spec() const { return spec_; }
  std::size_t n_cols() const { return spec_.n_cols(); }

  // row(e, j) with e the exposure-basis index and j the lag-basis index,
  // flattened as e * lag_cols + j:
  //   out[e, j] = sum_l exposure_basis_e(temps[l]) * lag_basis_j(l)
  void row(const std::vector<double>& temps, double* out) const;

  // basis vector of a single (exposure value, lag) point:
  //   kron(exposure_basis(x), lag_basis(l))
  void point(double x, int lag, double* out) const;

 private:
  CrossBasisSpec spec_;
  la::Matrix lag_rows_;  // (max_lag+1) x lag_cols
};

struct Contrast {
  enum class Kind { Lag, Cumulative } kind;
  int lag = 0;  // the lag, or the upper end of the 0..lag window
  std::string name() const;
};

// lag0..lagL then cum0-1..cum0-L.
std::vector<Contrast> default_contrasts(int max_lag);

// Centered odds ratios target-vs-reference. beta/cov may be wider than the
// cross basis (trailing covariates such as the holiday indicator); the
// contrast vector is zero there. CIs are Wald on the log scale.
std::vector<EffectEstimate> predict_or(const CrossBasis& cb, const la::Vector& beta,
                                       const la::Matrix& cov, double target_temp, double ref_temp,
                                       const std::vector<Contrast>& contrasts);

// The reporting rule: keep a code iff the lag-0 lower CI bound exceeds 1,
// compared on unrounded values.
bool significant_lag0(const std::vector<EffectEstimate>& estimates);

}  // namespace hwas
