#include "hwas/dlnm.hpp"

#include <cmath>
#include <cstring>

#include "hwas/errors.hpp"
#include "hwas/kern/kernels.hpp"

namespace hwas {

void CrossBasisSpec::validate() const {
  if (max_lag < 0) throw Error(Errc::InvalidInput, "max_lag must be >= 0");
  exposure.validate();
  if (max_lag > 0) {
    lag.validate();
    if (lag.lo != 0.0 || lag.hi != static_cast<double>(max_lag))
      throw Error(Errc::InvalidInput, "lag basis must span [0, max_lag]");
  }
}

CrossBasis::CrossBasis(CrossBasisSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t lc = spec_.lag_cols();
  lag_rows_ = la::Matrix(spec_.max_lag + 1, lc);
  if (spec_.max_lag == 0) {
    lag_rows_(0, 0) = 1.0;
  } else {
    for (int l = 0; l <= spec_.max_lag; ++l)
      basis_row(spec_.lag, static_cast<double>(l), lag_rows_.row(l));
  }
}

void CrossBasis::row(const std::vector<double>& temps, double* out) const {
  if (temps.size() != static_cast<std::size_t>(spec_.max_lag) + 1)
    throw Error(Errc::DimensionMismatch, "lagged exposure length != max_lag + 1");
  const std::size_t ec = spec_.exposure.n_cols();
  const std::size_t lc = spec_.lag_cols();
  std::memset(out, 0, sizeof(double) * ec * lc);
  std::vector<double> ex(ec);
  for (int l = 0; l <= spec_.max_lag; ++l) {
    basis_row(spec_.exposure, temps[l], ex.data());
    const double* lr = lag_rows_.row(l);
    for (std::size_t e = 0; e < ec; ++e) kern::axpy(ex[e], lr, out + e * lc, lc);
  }
}

void CrossBasis::point(double x, int lag, double* out) const {
  if (lag < 0 || lag > spec_.max_lag) throw Error(Errc::OutOfDomain, "lag outside window");
  const std::size_t ec = spec_.exposure.n_cols();
  const std::size_t lc = spec_.lag_cols();
  std::vector<double> ex(ec);
  basis_row(spec_.exposure, x, ex.data());
  const double* lr = lag_rows_.row(lag);
  for (std::size_t e = 0; e < ec; ++e)
    for (std::size_t j = 0; j < lc; ++j) out[e * lc + j] = ex[e] * lr[j];
}

std::string Contrast::name() const {
  if (kind == Kind::Lag) return "lag" + std::to_string(lag);
  return "cum0-" + std::to_string(lag);
}

std::vector<Contrast> default_contrasts(int max_lag) {
  std::vector<Contrast> cs;
  for (int l = 0; l <= max_lag; ++l) cs.push_back({Contrast::Kind::Lag, l});
  for (int h = 1; h <= max_lag; ++h) cs.push_back({Contrast::Kind::Cumulative, h});
  return cs;
}

std::vector<EffectEstimate> predict_or(const CrossBasis& cb, const la::Vector& beta,
                                       const la::Matrix& cov, double target_temp, double ref_temp,
                                       const std::vector<Contrast>& contrasts) {
  const std::size_t nb = cb.n_cols();
  const std::size_t dim = beta.size();
  if (dim < nb) throw Error(Errc::DimensionMismatch, "beta narrower than the cross basis");
  if (cov.rows() != dim || cov.cols() != dim)
    throw Error(Errc::DimensionMismatch, "cov does not match beta");

  // per-lag difference vectors target - reference
  const int L = cb.spec().max_lag;
  std::vector<la::Vector> dlag(L + 1, la::Vector(dim, 0.0));
  std::vector<double> ct(nb), cr(nb);
  for (int l = 0; l <= L; ++l) {
    cb.point(target_temp, l, ct.data());
    cb.point(ref_temp, l, cr.data());
    for (std::size_t k = 0; k < nb; ++k) dlag[l][k] = ct[k] - cr[k];
  }

  std::vector<EffectEstimate> out;
  out.reserve(contrasts.size());
  la::Vector d(dim);
  for (const Contrast& c : contrasts) {
    if (c.lag < 0 || c.lag > L) throw Error(Errc::DimensionMismatch, "contrast outside lag window");
    std::fill(d.begin(), d.end(), 0.0);
    if (c.kind == Contrast::Kind::Lag) {
      d = dlag[c.lag];
    } else {
      for (int l = 0; l <= c.lag; ++l)
        for (std::size_t k = 0; k < dim; ++k) d[k] += dlag[l][k];
    }
    const double log_or = kern::dot(d.data(), beta.data(), dim);
    double var = la::quad_form(cov, d);
    if (var < 0.0) var = 0.0;  // round-off on PSD matrices
    const double se = std::sqrt(var);

    EffectEstimate e;
    e.contrast = c.name();
    e.point = std::exp(log_or);
    e.ci_low = std::exp(log_or - kZ95 * se);
    e.ci_high = std::exp(log_or + kZ95 * se);
    e.log_se = se;
    out.push_back(std::move(e));
  }
  return out;
}

bool significant_lag0(const std::vector<EffectEstimate>& estimates) {
  for (const EffectEstimate& e : estimates)
    if (e.contrast == "lag0") return e.ci_low > 1.0;
  throw Error(Errc::InvalidInput, "no lag0 contrast present");
}

}  // namespace hwas
