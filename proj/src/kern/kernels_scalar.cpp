#include <cmath>
#include <cstring>

#include "hwas/kern/kernels.hpp"

namespace hwas::kern {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void vexp_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

void gram_scalar(const double* X, const double* w, std::size_t n, std::size_t p, double* G) {
  std::memset(G, 0, sizeof(double) * p * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const double wi = w ? w[i] : 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double a = wi * row[j];
      double* gj = G + j * p;
      for (std::size_t k = j; k < p; ++k) gj[k] += a * row[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) G[j * p + k] = G[k * p + j];
}

void tmatvec_scalar(const double* X, const double* v, std::size_t n, std::size_t p, double* out) {
  std::memset(out, 0, sizeof(double) * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const double vi = v[i];
    for (std::size_t j = 0; j < p; ++j) out[j] += vi * row[j];
  }
}

void syr_scalar(double alpha, const double* x, std::size_t p, double* A) {
  for (std::size_t j = 0; j < p; ++j) {
    const double a = alpha * x[j];
    double* aj = A + j * p;
    for (std::size_t k = 0; k < p; ++k) aj[k] += a * x[k];
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar",       sum_scalar,  dot_scalar, wdot_scalar, axpy_scalar,
                       vexp_scalar,    gram_scalar, tmatvec_scalar, syr_scalar};
  return ops;
}

}  // namespace hwas::kern
