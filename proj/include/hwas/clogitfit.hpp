#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hwas/la.hpp"

namespace hwas {

// One matched set: the case day plus its referent days, as design rows of
// equal width. Exactly one case per stratum by construction of the design.
struct Stratum {
  la::Matrix rows;  // members x dim
  std::size_t case_index = 0;
  std::string stratum_id;
};

struct StabilityFlags {
  bool nonconvergence = false;
  bool large_se = false;   // any checked SE > 10
  bool extreme_or = false; // any exp(beta) non-finite or > 100, or divergence
  bool is_stable() const { return !nonconvergence && !large_se && !extreme_or; }
  std::string reason() const;
};

struct ClogitFit {
  la::Vector beta;  // full width; aliased entries are zero
  la::Matrix cov;   // inverse observed information, zero on aliased rows/cols
  bool converged = false;
  bool diverged = false;  // separation-style parameter blow-up
  int iterations = 0;
  double loglik = 0.0;
  StabilityFlags stability;
  // Columns with no within-stratum variation (at tolerance): unidentifiable
  // under the conditional likelihood, fixed at zero.
  std::vector<std::size_t> aliased_columns;
  std::size_t n_strata_used = 0;
  std::size_t n_strata_dropped = 0;  // all member rows identical
};

// Newton-Raphson with step halving on the conditional logistic likelihood
// sum_s [x_case'b - log sum_j exp(x_j'b)]. Strata whose member rows are all
// identical carry no information and are dropped (counted). Throws
// NoInformativeStrata when nothing usable remains. Separation is detected by
// parameter blow-up (|beta_k| > 50 or a non-finite update) and reported via
// the stability flags instead of an exception.
ClogitFit fit_clogit(const std::vector<Stratum>& strata, double tol = 1e-8, int max_iter = 50);

// Recomputes the flags from a fit, restricted to the given columns (all
// non-aliased columns when empty): SE > se_cap, exp(beta) non-finite or
// > or_cap, plus non-convergence and divergence.
StabilityFlags stability_check(const ClogitFit& fit,
                               const std::vector<std::size_t>& check_columns = {},
                               double se_cap = 10.0, double or_cap = 100.0);

}  // namespace hwas
