// AVX2+FMA backend. Built only on x86-64; this translation unit is compiled
// with -mavx2 -mfma and must not be entered unless the CPU reports both.

#include <cmath>
#include <cstring>
#include <immintrin.h>

#include "hwas/kern/kernels.hpp"

namespace hwas::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_avx2(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(wx, _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

// exp on 4 lanes: round-to-nearest base-2 argument reduction with a
// Cody-Waite split of ln2, degree-13 Taylor polynomial on |r| <= ln2/2,
// then scaling by 2^n through the exponent bits. Results that would be
// subnormal are flushed to zero; the fitters never get near that range.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  const __m256d hi_cut = _mm256_set1_pd(709.782712893383996732);
  const __m256d lo_cut = _mm256_set1_pd(-708.396418532264106224);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(HUGE_VAL), _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ));
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ));
  res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return res;
}

void vexp_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
  if (i < n) {
    double in[4] = {0, 0, 0, 0};
    double out[4];
    std::memcpy(in, x + i, sizeof(double) * (n - i));
    _mm256_storeu_pd(out, exp4(_mm256_loadu_pd(in)));
    std::memcpy(y + i, out, sizeof(double) * (n - i));
  }
}

void gram_avx2(const double* X, const double* w, std::size_t n, std::size_t p, double* G) {
  std::memset(G, 0, sizeof(double) * p * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const double wi = w ? w[i] : 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double a = wi * row[j];
      double* gj = G + j * p;
      const __m256d va = _mm256_set1_pd(a);
      std::size_t k = j;
      for (; k + 4 <= p; k += 4) {
        __m256d g = _mm256_fmadd_pd(va, _mm256_loadu_pd(row + k), _mm256_loadu_pd(gj + k));
        _mm256_storeu_pd(gj + k, g);
      }
      for (; k < p; ++k) gj[k] += a * row[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) G[j * p + k] = G[k * p + j];
}

void tmatvec_avx2(const double* X, const double* v, std::size_t n, std::size_t p, double* out) {
  std::memset(out, 0, sizeof(double) * p);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = X + i * p;
    const __m256d vi = _mm256_set1_pd(v[i]);
    std::size_t j = 0;
    for (; j + 4 <= p; j += 4) {
      __m256d o = _mm256_fmadd_pd(vi, _mm256_loadu_pd(row + j), _mm256_loadu_pd(out + j));
      _mm256_storeu_pd(out + j, o);
    }
    for (; j < p; ++j) out[j] += v[i] * row[j];
  }
}

void syr_avx2(double alpha, const double* x, std::size_t p, double* A) {
  for (std::size_t j = 0; j < p; ++j) {
    const double a = alpha * x[j];
    double* aj = A + j * p;
    const __m256d va = _mm256_set1_pd(a);
    std::size_t k = 0;
    for (; k + 4 <= p; k += 4) {
      __m256d v = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(aj + k));
      _mm256_storeu_pd(aj + k, v);
    }
    for (; k < p; ++k) aj[k] += a * x[k];
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2",    sum_avx2,  dot_avx2, wdot_avx2, axpy_avx2,
                       vexp_avx2, gram_avx2, tmatvec_avx2, syr_avx2};
  return ops;
}

}  // namespace hwas::kern
