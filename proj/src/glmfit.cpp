#include "hwas/glmfit.hpp"

#include <algorithm>
#include <cmath>

#include "hwas/errors.hpp"
#include "hwas/kern/kernels.hpp"

namespace hwas {

namespace {

constexpr double kEtaClamp = 30.0;  // exp(30) ~ 1e13 daily counts; far beyond any real series
constexpr double kWeightFloor = 1e-12;
constexpr double kPhiFloor = 1e-12;

double poisson_deviance(const std::vector<double>& y, const la::Vector& mu) {
  double dev = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double term = (y[i] > 0.0) ? y[i] * std::log(y[i] / mu[i]) - (y[i] - mu[i]) : mu[i];
    dev += term;
  }
  return 2.0 * dev;
}

}  // namespace

QuasiPoissonFit fit_quasipoisson(const std::vector<double>& y, const DesignMatrix& design,
                                 double tol, int max_iter) {
  const std::size_t n = y.size();
  if (n != design.X.rows()) throw Error(Errc::DimensionMismatch, "y length != design rows");
  if (design.names.size() != design.X.cols())
    throw Error(Errc::DimensionMismatch, "design names != columns");

  double ysum = 0.0;
  for (double v : y) {
    if (v < 0.0 || !std::isfinite(v)) throw Error(Errc::InvalidInput, "counts must be nonnegative");
    ysum += v;
  }
  if (ysum <= 0.0) throw Error(Errc::InvalidInput, "all counts are zero");

  QuasiPoissonFit fit;

  // Prune identically-zero columns (unused factor levels), plus 0/1
  // indicator columns whose active rows carry no events: their MLE sits at
  // -infinity and the collapsing weights would wreck the normal equations.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < design.X.cols(); ++j) {
    bool any = false;
    bool indicator = true;
    double events = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = design.X(i, j);
      if (x != 0.0) any = true;
      if (x != 0.0 && x != 1.0) indicator = false;
      events += x * y[i];
    }
    const bool degenerate = !any || (indicator && events == 0.0);
    if (!degenerate) {
      keep.push_back(j);
      fit.names.push_back(design.names[j]);
    } else {
      fit.pruned_columns.push_back(design.names[j]);
    }
  }
  const std::size_t p = keep.size();
  if (p == 0) throw Error(Errc::Collinear, "no usable columns");

  la::Matrix X(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) X(i, j) = design.X(i, keep[j]);

  // standard GLM start: mu = y + 0.1 keeps log defined on zero counts
  la::Vector eta(n), mu(n), w(n), wz(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = y[i] + 0.1;
    eta[i] = std::log(mu[i]);
  }

  double dev = poisson_deviance(y, mu);
  la::Matrix G;
  for (int it = 1; it <= max_iter; ++it) {
    fit.iterations = it;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::max(mu[i], kWeightFloor);
      const double z = eta[i] + (y[i] - mu[i]) / w[i];
      wz[i] = w[i] * z;
    }
    G = la::gram(X, &w);
    la::Vector b = la::tmatvec(X, wz);
    la::Chol C = la::cholesky(G, 1e-10);
    if (!C.ok) throw Error(Errc::Collinear, "weighted design is rank deficient");
    fit.beta = la::chol_solve(C, b);

    eta = la::matvec(X, fit.beta);
    for (double& e : eta) e = std::clamp(e, -kEtaClamp, kEtaClamp);
    kern::vexp(eta.data(), mu.data(), n);

    const double dev_new = poisson_deviance(y, mu);
    const double rel = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
    dev = dev_new;
    if (rel < tol) {
      fit.converged = true;
      break;
    }
  }
  fit.deviance = dev;

  // Pearson dispersion and scaled covariance at the converged weights
  double pearson = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::max(mu[i], kWeightFloor);
    const double r = y[i] - mu[i];
    pearson += r * r / m;
  }
  const double df = static_cast<double>(n) - static_cast<double>(p);
  double phi = df > 0.0 ? pearson / df : 0.0;
  if (df <= 0.0 || phi < kPhiFloor) {
    phi = std::max(phi, kPhiFloor);
    fit.phi_floored = true;
  }
  fit.dispersion_phi = phi;

  for (std::size_t i = 0; i < n; ++i) w[i] = std::max(mu[i], kWeightFloor);
  G = la::gram(X, &w);
  la::Chol C = la::cholesky(G, 1e-10);
  if (!C.ok) throw Error(Errc::Collinear, "weighted design is rank deficient at solution");
  la::Matrix inv = la::chol_inverse(C);
  fit.cov = la::Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) fit.cov(i, j) = phi * inv(i, j);

  return fit;
}

EffectEstimate irr_and_pvalue(const QuasiPoissonFit& fit, const std::string& covariate) {
  auto it = std::find(fit.names.begin(), fit.names.end(), covariate);
  if (it == fit.names.end())
    throw Error(Errc::UnknownCovariate, "covariate not in fit: " + covariate);
  const std::size_t j = static_cast<std::size_t>(it - fit.names.begin());

  const double beta = fit.beta[j];
  const double se = std::sqrt(fit.cov(j, j));
  EffectEstimate e;
  e.contrast = covariate;
  e.point = std::exp(beta);
  e.ci_low = std::exp(beta - kZ95 * se);
  e.ci_high = std::exp(beta + kZ95 * se);
  e.log_se = se;
  e.p_value = se > 0.0 ? wald_two_sided_p(beta / se) : (beta == 0.0 ? 1.0 : 0.0);
  return e;
}

}  // namespace hwas
