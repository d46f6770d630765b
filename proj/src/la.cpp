#include "hwas/la.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hwas/kern/kernels.hpp"

namespace hwas::la {

Vector matvec(const Matrix& A, const Vector& x) {
  if (x.size() != A.cols()) throw std::invalid_argument("matvec: size mismatch");
  Vector out(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) out[i] = kern::dot(A.row(i), x.data(), A.cols());
  return out;
}

Vector tmatvec(const Matrix& A, const Vector& v) {
  if (v.size() != A.rows()) throw std::invalid_argument("tmatvec: size mismatch");
  Vector out(A.cols());
  kern::tmatvec(A.data(), v.data(), A.rows(), A.cols(), out.data());
  return out;
}

Matrix gram(const Matrix& X, const Vector* w) {
  if (w && w->size() != X.rows()) throw std::invalid_argument("gram: weight size mismatch");
  Matrix G(X.cols(), X.cols());
  kern::gram(X.data(), w ? w->data() : nullptr, X.rows(), X.cols(), G.data());
  return G;
}

double quad_form(const Matrix& A, const Vector& d) {
  if (A.rows() != d.size() || A.cols() != d.size())
    throw std::invalid_argument("quad_form: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * kern::dot(A.row(i), d.data(), d.size());
  return s;
}

Chol cholesky(const Matrix& A, double rel_tol) {
  const std::size_t p = A.rows();
  Chol c;
  c.L = Matrix(p, p);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(A(i, i)));
  const double floor = rel_tol * max_diag;

  for (std::size_t j = 0; j < p; ++j) {
    double d = A(j, j) - kern::dot(c.L.row(j), c.L.row(j), j);
    if (!(d > floor) || !std::isfinite(d)) return c;  // ok stays false
    d = std::sqrt(d);
    c.L(j, j) = d;
    for (std::size_t i = j + 1; i < p; ++i) {
      const double s = A(i, j) - kern::dot(c.L.row(i), c.L.row(j), j);
      c.L(i, j) = s / d;
    }
  }
  c.ok = true;
  return c;
}

Vector chol_solve(const Chol& C, const Vector& b) {
  const std::size_t p = C.L.rows();
  if (!C.ok) throw std::runtime_error("chol_solve on failed factorization");
  if (b.size() != p) throw std::invalid_argument("chol_solve: size mismatch");
  Vector y(p);
  for (std::size_t i = 0; i < p; ++i)
    y[i] = (b[i] - kern::dot(C.L.row(i), y.data(), i)) / C.L(i, i);
  Vector x(p);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= C.L(k, ii) * x[k];
    x[ii] = s / C.L(ii, ii);
  }
  return x;
}

Matrix chol_inverse(const Chol& C) {
  const std::size_t p = C.L.rows();
  Matrix inv(p, p);
  Vector e(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    e[j] = 1.0;
    Vector col = chol_solve(C, e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < p; ++i) inv(i, j) = col[i];
  }
  // enforce exact symmetry against round-off drift
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

std::vector<std::size_t> psd_pivot_columns(const Matrix& A, double rel_tol) {
  const std::size_t p = A.rows();
  Matrix W = A;
  std::vector<bool> used(p, false);
  std::vector<std::size_t> order;
  double max0 = 0.0;
  for (std::size_t i = 0; i < p; ++i) max0 = std::max(max0, W(i, i));
  if (max0 <= 0.0) return order;
  const double floor = rel_tol * max0;

  for (std::size_t step = 0; step < p; ++step) {
    std::size_t q = p;
    double best = floor;
    for (std::size_t i = 0; i < p; ++i)
      if (!used[i] && W(i, i) > best) {
        best = W(i, i);
        q = i;
      }
    if (q == p) break;
    used[q] = true;
    order.push_back(q);
    const double piv = W(q, q);
    for (std::size_t i = 0; i < p; ++i) {
      if (used[i]) continue;
      const double f = W(i, q) / piv;
      for (std::size_t j = 0; j < p; ++j)
        if (!used[j]) W(i, j) -= f * W(q, j);
    }
  }
  return order;
}

}  // namespace hwas::la
