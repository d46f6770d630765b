#include "hwas/clogitfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hwas/errors.hpp"
#include "hwas/kern/kernels.hpp"

namespace hwas {

namespace {

constexpr double kBetaCap = 50.0;
constexpr int kMaxHalvings = 20;
constexpr double kAliasTol = 1e-9;

bool all_rows_identical(const la::Matrix& rows) {
  for (std::size_t i = 1; i < rows.rows(); ++i)
    if (std::memcmp(rows.row(i), rows.row(0), sizeof(double) * rows.cols()) != 0) return false;
  return true;
}

// log-likelihood only (for step halving)
double loglik_at(const std::vector<const Stratum*>& strata, const la::Vector& beta,
                 std::vector<double>& scores) {
  double ll = 0.0;
  for (const Stratum* s : strata) {
    const std::size_t m = s->rows.rows();
    scores.resize(m);
    double smax = -HUGE_VAL;
    for (std::size_t j = 0; j < m; ++j) {
      scores[j] = kern::dot(s->rows.row(j), beta.data(), beta.size());
      smax = std::max(smax, scores[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) z += std::exp(scores[j] - smax);
    ll += scores[s->case_index] - smax - std::log(z);
  }
  return ll;
}

// log-likelihood, score vector and observed information in one sweep
double eval_all(const std::vector<const Stratum*>& strata, const la::Vector& beta,
                la::Vector& grad, la::Matrix& hess) {
  const std::size_t p = beta.size();
  grad.assign(p, 0.0);
  hess = la::Matrix(p, p, 0.0);
  std::vector<double> scores, prob;
  la::Vector xbar(p);
  double ll = 0.0;

  for (const Stratum* s : strata) {
    const std::size_t m = s->rows.rows();
    scores.resize(m);
    prob.resize(m);
    double smax = -HUGE_VAL;
    for (std::size_t j = 0; j < m; ++j) {
      scores[j] = kern::dot(s->rows.row(j), beta.data(), p);
      smax = std::max(smax, scores[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      prob[j] = std::exp(scores[j] - smax);
      z += prob[j];
    }
    for (std::size_t j = 0; j < m; ++j) prob[j] /= z;
    ll += scores[s->case_index] - smax - std::log(z);

    std::fill(xbar.begin(), xbar.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) kern::axpy(prob[j], s->rows.row(j), xbar.data(), p);
    for (std::size_t k = 0; k < p; ++k) grad[k] += s->rows(s->case_index, k) - xbar[k];
    // information: sum_j p_j x_j x_j' - xbar xbar'
    for (std::size_t j = 0; j < m; ++j) kern::syr(prob[j], s->rows.row(j), p, hess.data());
    kern::syr(-1.0, xbar.data(), p, hess.data());
  }
  return ll;
}

}  // namespace

std::string StabilityFlags::reason() const {
  std::string r;
  auto add = [&](const char* s) {
    if (!r.empty()) r += "+";
    r += s;
  };
  if (nonconvergence) add("nonconvergence");
  if (large_se) add("large_se");
  if (extreme_or) add("extreme_or");
  return r.empty() ? "stable" : r;
}

ClogitFit fit_clogit(const std::vector<Stratum>& strata, double tol, int max_iter) {
  if (strata.empty()) throw Error(Errc::NoInformativeStrata, "no strata supplied");
  const std::size_t dim = strata.front().rows.cols();

  std::vector<const Stratum*> used;
  used.reserve(strata.size());
  std::size_t dropped = 0;
  for (const Stratum& s : strata) {
    if (s.rows.cols() != dim) throw Error(Errc::DimensionMismatch, "stratum width mismatch");
    if (s.rows.rows() < 2 || s.case_index >= s.rows.rows())
      throw Error(Errc::InvalidInput, "stratum needs one case and at least one control");
    if (all_rows_identical(s.rows)) {
      ++dropped;
      continue;
    }
    used.push_back(&s);
  }
  if (used.empty()) throw Error(Errc::NoInformativeStrata, "all strata are exposure-constant");

  ClogitFit fit;
  fit.n_strata_used = used.size();
  fit.n_strata_dropped = dropped;

  // Identifiability probe at beta = 0: the information there is the pooled
  // within-stratum covariance, whose null space is exactly the set of
  // covariate combinations constant within every stratum (the cross-basis
  // construction produces a few by design). Those columns are aliased to
  // zero and the model is fit on the rest.
  la::Vector beta0(dim, 0.0);
  la::Vector g0;
  la::Matrix h0;
  eval_all(used, beta0, g0, h0);
  std::vector<std::size_t> kept = la::psd_pivot_columns(h0, kAliasTol);
  std::sort(kept.begin(), kept.end());
  {
    std::vector<bool> is_kept(dim, false);
    for (std::size_t k : kept) is_kept[k] = true;
    for (std::size_t j = 0; j < dim; ++j)
      if (!is_kept[j]) fit.aliased_columns.push_back(j);
  }
  if (kept.empty()) throw Error(Errc::NoInformativeStrata, "no identifiable covariate directions");

  // reduced copies of the member rows
  std::vector<Stratum> red(used.size());
  std::vector<const Stratum*> redp(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    const Stratum& s = *used[i];
    red[i].case_index = s.case_index;
    red[i].rows = la::Matrix(s.rows.rows(), kept.size());
    for (std::size_t r = 0; r < s.rows.rows(); ++r)
      for (std::size_t c = 0; c < kept.size(); ++c) red[i].rows(r, c) = s.rows(r, kept[c]);
    redp[i] = &red[i];
  }

  const std::size_t p = kept.size();
  la::Vector beta(p, 0.0), grad;
  la::Matrix hess;
  double ll = eval_all(redp, beta, grad, hess);
  std::vector<double> scratch;

  for (int it = 1; it <= max_iter; ++it) {
    fit.iterations = it;

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < tol) {
      fit.converged = true;
      break;
    }

    // Newton direction; escalate a ridge if the information is borderline
    la::Vector step;
    bool solved = false;
    double maxdiag = 0.0;
    for (std::size_t j = 0; j < p; ++j) maxdiag = std::max(maxdiag, hess(j, j));
    for (double ridge : {0.0, 1e-10, 1e-7, 1e-4}) {
      la::Matrix h = hess;
      if (ridge > 0.0)
        for (std::size_t j = 0; j < p; ++j) h(j, j) += ridge * maxdiag;
      la::Chol C = la::cholesky(h, 1e-13);
      if (C.ok) {
        step = la::chol_solve(C, grad);
        solved = true;
        break;
      }
    }
    if (!solved) break;  // flat or broken curvature; flags below

    // step halving until the likelihood improves
    double ll_new = -HUGE_VAL;
    la::Vector cand(p);
    bool improved = false;
    double scale = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      for (std::size_t j = 0; j < p; ++j) cand[j] = beta[j] + scale * step[j];
      ll_new = loglik_at(redp, cand, scratch);
      if (std::isfinite(ll_new) && ll_new >= ll - 1e-12) {
        improved = true;
        break;
      }
    }
    if (!improved) break;

    beta = cand;
    bool blown = false;
    for (double b : beta)
      if (!std::isfinite(b) || std::abs(b) > kBetaCap) blown = true;
    if (blown) {
      fit.diverged = true;
      break;
    }
    ll = eval_all(redp, beta, grad, hess);
  }

  if (!fit.converged && !fit.diverged) {
    // either max_iter hit or curvature trouble; final gradient check
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < tol) fit.converged = true;
  }

  fit.loglik = ll;

  // expand estimates back to the full width; aliased entries stay zero
  fit.beta.assign(dim, 0.0);
  for (std::size_t c = 0; c < p; ++c) fit.beta[kept[c]] = beta[c];
  fit.cov = la::Matrix(dim, dim, 0.0);
  la::Chol C = la::cholesky(hess, 1e-13);
  if (C.ok) {
    la::Matrix inv = la::chol_inverse(C);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) fit.cov(kept[a], kept[b]) = inv(a, b);
  } else if (!fit.diverged) {
    fit.converged = false;
  }

  fit.stability = stability_check(fit);
  return fit;
}

StabilityFlags stability_check(const ClogitFit& fit, const std::vector<std::size_t>& check_columns,
                               double se_cap, double or_cap) {
  StabilityFlags f;
  f.nonconvergence = !fit.converged;
  f.extreme_or = fit.diverged;

  std::vector<std::size_t> cols = check_columns;
  if (cols.empty()) {
    std::vector<bool> aliased(fit.beta.size(), false);
    for (std::size_t a : fit.aliased_columns) aliased[a] = true;
    for (std::size_t j = 0; j < fit.beta.size(); ++j)
      if (!aliased[j]) cols.push_back(j);
  }
  for (std::size_t j : cols) {
    const double var = fit.cov(j, j);
    const double se = var >= 0.0 ? std::sqrt(var) : HUGE_VAL;
    if (se > se_cap) f.large_se = true;
    const double orv = std::exp(fit.beta[j]);
    if (!std::isfinite(orv) || orv > or_cap) f.extreme_or = true;
  }
  return f;
}

}  // namespace hwas
