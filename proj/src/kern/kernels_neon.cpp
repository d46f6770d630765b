// NEON backend for aarch64. Mirrors the AVX2 implementation two lanes at a
// time; see kernels_avx2.cpp for the exp reduction notes.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "hwas/kern/kernels.hpp"

namespace hwas::kern {
namespace {

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_neon(const double* w, const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t wx = vmulq_f64(vld1q_f64(w + i), vld1q_f64(x + i));
    acc = vfmaq_f64(acc, wx, vld1q_f64(y + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

inline float64x2_t exp2d(float64x2_t x) {
  const float64x2_t log2e = vdupq_n_f64(1.4426950408889634074);
  const float64x2_t ln2_hi = vdupq_n_f64(6.93147180369123816490e-01);
  const float64x2_t ln2_lo = vdupq_n_f64(1.90821492927058770002e-10);

  float64x2_t n = vrndnq_f64(vmulq_f64(x, log2e));
  float64x2_t r = vfmsq_f64(x, n, ln2_hi);
  r = vfmsq_f64(r, n, ln2_lo);

  float64x2_t p = vdupq_n_f64(1.0 / 6227020800.0);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 479001600.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 39916800.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 3628800.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 362880.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 40320.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 5040.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 720.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 120.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 24.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0 / 6.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(0.5), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);

  int64x2_t n64 = vcvtq_s64_f64(n);
  int64x2_t bits = vshlq_n_s64(vaddq_s64(n64, vdupq_n_s64(1023)), 52);
  float64x2_t res = vmulq_f64(p, vreinterpretq_f64_s64(bits));

  const float64x2_t hi_cut = vdupq_n_f64(709.782712893383996732);
  const float64x2_t lo_cut = vdupq_n_f64(-708.396418532264106224);
  res = vbslq_f64(vcgtq_f64(x, hi_cut), vdupq_n_f64(HUGE_VAL), res);
  res = vbslq_f64(vcltq_f64(x, lo_cut), vdupq_n_f64(0.0), res);
  uint64x2_t ord = vceqq_f64(x, x);
  res = vbslq_f64(ord, res, x);
  return res;
}

void vexp_neon(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, exp2d(vld1q_f64(x + i)));
  if (i < n) {
    double in[2] = {x[i], 0.0};
    double out[2];
    vst1q_f64(out, exp2d(vld1q_f64(in)));
    y[i] = out[0];
  }
}

void gram_neon(const double* X, const double* w, std::size_t n, std::size_t p, double* G) {
  std::memset(G, 0, sizeof(double) * p * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const double wi = w ? w[i] : 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double a = wi * row[j];
      double* gj = G + j * p;
      const float64x2_t va = vdupq_n_f64(a);
      std::size_t k = j;
      for (; k + 2 <= p; k += 2)
        vst1q_f64(gj + k, vfmaq_f64(vld1q_f64(gj + k), va, vld1q_f64(row + k)));
      for (; k < p; ++k) gj[k] += a * row[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) G[j * p + k] = G[k * p + j];
}

void tmatvec_neon(const double* X, const double* v, std::size_t n, std::size_t p, double* out) {
  std::memset(out, 0, sizeof(double) * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const float64x2_t vi = vdupq_n_f64(v[i]);
    std::size_t j = 0;
    for (; j + 2 <= p; j += 2)
      vst1q_f64(out + j, vfmaq_f64(vld1q_f64(out + j), vi, vld1q_f64(row + j)));
    for (; j < p; ++j) out[j] += v[i] * row[j];
  }
}

void syr_neon(double alpha, const double* x, std::size_t p, double* A) {
  for (std::size_t j = 0; j < p; ++j) {
    const double a = alpha * x[j];
    double* aj = A + j * p;
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t k = 0;
    for (; k + 2 <= p; k += 2)
      vst1q_f64(aj + k, vfmaq_f64(vld1q_f64(aj + k), va, vld1q_f64(x + k)));
    for (; k < p; ++k) aj[k] += a * x[k];
  }
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops{"neon",    sum_neon,  dot_neon, wdot_neon, axpy_neon,
                       vexp_neon, gram_neon, tmatvec_neon, syr_neon};
  return ops;
}

}  // namespace hwas::kern

#endif  // __aarch64__
