#include <cmath>
#include <random>

#include "doctest.h"
#include "hwas/dlnm.hpp"
#include "hwas/errors.hpp"

using namespace hwas;

namespace {

CrossBasisSpec toy_spec() {
  // linear exposure basis over [0,1], linear lag basis over [0,1]: 2x2
  CrossBasisSpec s;
  s.exposure = BasisSpec{BasisKind::BSpline, 1, {}, 0.0, 1.0, false};
  s.lag = BasisSpec{BasisKind::NaturalCubic, 3, {}, 0.0, 1.0, false};
  s.max_lag = 1;
  return s;
}

CrossBasisSpec default_spec(double lo, double hi, double knot, int max_lag, int lag_knots,
                            int degree = 2) {
  CrossBasisSpec s;
  s.exposure = BasisSpec{BasisKind::BSpline, degree, {knot}, lo, hi, false};
  s.lag = BasisSpec{BasisKind::NaturalCubic, 3, log_lag_knots(max_lag, lag_knots), 0.0,
                    static_cast<double>(max_lag), false};
  s.max_lag = max_lag;
  return s;
}

la::Matrix random_psd(std::mt19937_64& rng, std::size_t p) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  la::Matrix B(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) B(i, j) = u(rng);
  la::Matrix A(p, p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += B(k, i) * B(k, j);
      A(i, j) = s;
    }
  return A;
}

}  // namespace

TEST_CASE("cross-basis row by hand on a 2x2 basis") {
  CrossBasis cb(toy_spec());
  REQUIRE(cb.n_cols() == 4);
  // exposure hats: (1-x, x); lag basis {1, l} evaluated at l = 0, 1
  const double a = 0.25, b = 0.5;
  std::vector<double> row(4);
  cb.row({a, b}, row.data());
  CHECK(row[0] == doctest::Approx((1 - a) + (1 - b)).epsilon(1e-14));  // (e0, 1)
  CHECK(row[1] == doctest::Approx(1 - b).epsilon(1e-14));              // (e0, l)
  CHECK(row[2] == doctest::Approx(a + b).epsilon(1e-14));              // (e1, 1)
  CHECK(row[3] == doctest::Approx(b).epsilon(1e-14));                  // (e1, l)
}

TEST_CASE("constant exposure factorizes") {
  auto spec = default_spec(10.0, 40.0, 27.0, 3, 1);
  CrossBasis cb(spec);
  const double t = 31.5;
  std::vector<double> row(cb.n_cols());
  cb.row({t, t, t, t}, row.data());

  std::vector<double> ex(spec.exposure.n_cols());
  basis_row(spec.exposure, t, ex.data());
  la::Matrix lag = basis_eval(spec.lag, {0.0, 1.0, 2.0, 3.0});
  for (std::size_t e = 0; e < spec.exposure.n_cols(); ++e)
    for (std::size_t j = 0; j < spec.lag.n_cols(); ++j) {
      double lag_sum = 0.0;
      for (int l = 0; l <= 3; ++l) lag_sum += lag(l, j);
      CHECK(row[e * spec.lag.n_cols() + j] == doctest::Approx(ex[e] * lag_sum).epsilon(1e-12));
    }
}

TEST_CASE("max_lag zero reduces to the exposure basis") {
  CrossBasisSpec s;
  s.exposure = BasisSpec{BasisKind::BSpline, 2, {0.5}, 0.0, 1.0, false};
  s.max_lag = 0;
  CrossBasis cb(s);
  REQUIRE(cb.n_cols() == 4);
  std::vector<double> row(4), ex(4);
  cb.row({0.3}, row.data());
  basis_row(s.exposure, 0.3, ex.data());
  for (int i = 0; i < 4; ++i) CHECK(row[i] == ex[i]);
}

TEST_CASE("prediction is exactly centered at the reference") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  for (int rep = 0; rep < 100; ++rep) {
    la::Vector beta(cb.n_cols());
    for (double& b : beta) b = u(rng);
    la::Matrix cov = random_psd(rng, cb.n_cols());
    auto est = predict_or(cb, beta, cov, 27.6, 27.6, default_contrasts(3));
    REQUIRE(est.size() == 7);
    for (const auto& e : est) {
      CHECK(e.point == 1.0);
      CHECK(e.ci_low == 1.0);
      CHECK(e.ci_high == 1.0);
    }
  }
}

TEST_CASE("cumulative log-OR equals the sum of lag-specific log-ORs") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  for (int rep = 0; rep < 50; ++rep) {
    la::Vector beta(cb.n_cols());
    for (double& b : beta) b = u(rng);
    la::Matrix cov = random_psd(rng, cb.n_cols());
    auto est = predict_or(cb, beta, cov, 33.7, 27.6, default_contrasts(3));
    // order: lag0..lag3, cum0-1..cum0-3
    for (int h = 1; h <= 3; ++h) {
      double sum_logs = 0.0;
      for (int l = 0; l <= h; ++l) sum_logs += std::log(est[l].point);
      CHECK(std::log(est[3 + h].point) == doctest::Approx(sum_logs).epsilon(1e-12));
    }
  }
}

TEST_CASE("null coefficients give OR 1 with width from cov") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  la::Vector beta(cb.n_cols(), 0.0);
  std::mt19937_64 rng(11);
  la::Matrix cov = random_psd(rng, cb.n_cols());
  auto est = predict_or(cb, beta, cov, 33.7, 27.6, default_contrasts(3));
  for (const auto& e : est) {
    CHECK(e.point == doctest::Approx(1.0));
    CHECK(e.ci_low <= 1.0);
    CHECK(e.ci_high >= 1.0);
  }
}

TEST_CASE("CI is symmetric on the log scale and scales with cov") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  la::Vector beta(cb.n_cols());
  for (double& b : beta) b = u(rng);
  la::Matrix cov = random_psd(rng, cb.n_cols());

  auto est = predict_or(cb, beta, cov, 33.7, 27.6, default_contrasts(3));
  la::Matrix cov4 = cov;
  for (std::size_t i = 0; i < cov.rows(); ++i)
    for (std::size_t j = 0; j < cov.cols(); ++j) cov4(i, j) *= 4.0;
  auto est4 = predict_or(cb, beta, cov4, 33.7, 27.6, default_contrasts(3));

  for (std::size_t k = 0; k < est.size(); ++k) {
    const double hw = std::log(est[k].ci_high) - std::log(est[k].point);
    const double lw = std::log(est[k].point) - std::log(est[k].ci_low);
    CHECK(hw == doctest::Approx(lw).epsilon(1e-12));
    const double hw4 = std::log(est4[k].ci_high) - std::log(est4[k].point);
    CHECK(hw4 == doctest::Approx(2.0 * hw).epsilon(1e-10));
  }
}

TEST_CASE("beta wider than the basis carries extra covariates") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  la::Vector beta(cb.n_cols() + 1, 0.1);  // trailing holiday coefficient
  la::Matrix cov(beta.size(), beta.size(), 0.0);
  for (std::size_t i = 0; i < beta.size(); ++i) cov(i, i) = 0.01;
  auto est = predict_or(cb, beta, cov, 33.7, 27.6, default_contrasts(3));
  CHECK(est.size() == 7);

  la::Vector narrow(cb.n_cols(), 0.1);
  la::Matrix covn(cb.n_cols(), cb.n_cols(), 0.0);
  for (std::size_t i = 0; i < covn.rows(); ++i) covn(i, i) = 0.01;
  auto est2 = predict_or(cb, narrow, covn, 33.7, 27.6, default_contrasts(3));
  for (std::size_t k = 0; k < est.size(); ++k)
    CHECK(est[k].point == doctest::Approx(est2[k].point).epsilon(1e-14));
}

TEST_CASE("dimension mismatches raise") {
  auto spec = default_spec(15.0, 40.0, 27.6, 3, 1);
  CrossBasis cb(spec);
  la::Vector beta(3, 0.0);
  la::Matrix cov(3, 3, 0.0);
  CHECK_THROWS_AS(predict_or(cb, beta, cov, 33.7, 27.6, default_contrasts(3)), Error);
}

TEST_CASE("significance filter is strict at 1") {
  std::vector<EffectEstimate> est(1);
  est[0].contrast = "lag0";
  est[0].point = 1.12;
  est[0].ci_low = 1.07;
  est[0].ci_high = 1.18;
  CHECK(significant_lag0(est));
  est[0].ci_low = 0.99;
  CHECK_FALSE(significant_lag0(est));
  est[0].ci_low = 1.0;
  CHECK_FALSE(significant_lag0(est));
}
