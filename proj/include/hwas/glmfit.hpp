#pragma once

#include <string>
#include <vector>

#include "hwas/estimates.hpp"
#include "hwas/la.hpp"

namespace hwas {

// Named design matrix for the daily-count regressions. Factor covariates are
// encoded upstream with one reference level dropped; columns that end up
// identically zero (factor levels absent from the data slice) are pruned by
// the fitter before rank checks.
struct DesignMatrix {
  la::Matrix X;
  std::vector<std::string> names;
};

struct QuasiPoissonFit {
  la::Vector beta;             // indexed like names
  la::Matrix cov;              // dispersion-scaled: phi * (X'WX)^-1
  double dispersion_phi = 1.0; // Pearson chi-square / residual df
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> names;           // columns actually fitted
  std::vector<std::string> pruned_columns;  // all-zero columns removed
  double deviance = 0.0;
  bool phi_floored = false;  // residual df was 0 or phi fell below 1e-12
};

// IRLS for the Poisson log-likelihood with log link; the quasi-Poisson part
// is the Pearson dispersion scaling of the covariance (point estimates are
// the plain Poisson MLE). Convergence is relative deviance change < tol.
// Throws Collinear if the pruned design is rank deficient, NotConverged is
// reported through the flag, not thrown.
QuasiPoissonFit fit_quasipoisson(const std::vector<double>& y, const DesignMatrix& design,
                                 double tol = 1e-8, int max_iter = 50);

// Rate ratio, 95% CI and two-sided Wald p for one named covariate.
EffectEstimate irr_and_pvalue(const QuasiPoissonFit& fit, const std::string& covariate);

}  // namespace hwas
