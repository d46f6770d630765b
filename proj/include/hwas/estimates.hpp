#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace hwas {

// A named multiplicative effect (odds ratio or rate ratio) with its 95% CI.
// Intervals are symmetric on the log scale; p_value is filled only where a
// Wald test is part of the contract (stage-1 rate ratios).
struct EffectEstimate {
  std::string contrast;
  double point = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
  double log_se = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
};

// Two-sided p from a standard-normal Wald statistic.
inline double wald_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

inline constexpr double kZ95 = 1.96;

}  // namespace hwas
