#pragma once

#include <cstddef>
#include <string>

namespace hwas::kern {

// Dense double-precision primitives behind the model fitters. Every entry
// point has a scalar reference implementation plus SIMD variants selected
// once at startup from CPU capabilities (overridable with HWAS_KERNELS=
// scalar|avx2|neon for testing). SIMD variants are equivalence-tested
// against the scalar reference; they may differ in the last few ulp from
// summation reassociation.
struct Ops {
  const char* name;

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i w[i] * x[i] * y[i]
  double (*wdot)(const double* w, const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] = exp(x[i])
  void (*vexp)(const double* x, double* y, std::size_t n);
  // G = X' diag(w) X for row-major X (n x p); w may be null (unit weights).
  // G is p x p row-major, fully written (symmetric).
  void (*gram)(const double* X, const double* w, std::size_t n, std::size_t p, double* G);
  // out = X' v for row-major X (n x p), v length n.
  void (*tmatvec)(const double* X, const double* v, std::size_t n, std::size_t p, double* out);
  // A += alpha * x x' for p x p row-major A, fully written (symmetric update).
  void (*syr)(double alpha, const double* x, std::size_t p, double* A);
};

const Ops& scalar_ops();
#if defined(HWAS_HAVE_AVX2)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

// The backend in use. Resolved once; thread-safe.
const Ops& active();

// Force a backend by name ("scalar", "avx2", "neon", "auto"). Throws on an
// unknown or unavailable name. Intended for tests and the CLI.
void force_backend(const std::string& name);

std::string available_backends();

inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double wdot(const double* w, const double* x, const double* y, std::size_t n) {
  return active().wdot(w, x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline void vexp(const double* x, double* y, std::size_t n) { active().vexp(x, y, n); }
inline void gram(const double* X, const double* w, std::size_t n, std::size_t p, double* G) {
  active().gram(X, w, n, p, G);
}
inline void tmatvec(const double* X, const double* v, std::size_t n, std::size_t p, double* out) {
  active().tmatvec(X, v, n, p, out);
}
inline void syr(double alpha, const double* x, std::size_t p, double* A) {
  active().syr(alpha, x, p, A);
}

}  // namespace hwas::kern
