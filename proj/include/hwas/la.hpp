#pragma once

#include <cstddef>
#include <vector>

namespace hwas::la {

using Vector = std::vector<double>;

// Row-major dense matrix. Model designs here are tall and thin (thousands of
// rows, < 40 columns), so all decompositions are plain O(p^3) routines; the
// row-sweep accumulations go through the kern backends.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

Vector matvec(const Matrix& A, const Vector& x);   // A x
Vector tmatvec(const Matrix& A, const Vector& v);  // A' v
// X' diag(w) X; pass nullptr for unit weights.
Matrix gram(const Matrix& X, const Vector* w);

// d' A d for symmetric A.
double quad_form(const Matrix& A, const Vector& d);

// Cholesky A = L L' for symmetric positive definite A. ok is false when a
// pivot falls at or below rel_tol times the largest diagonal (rank
// deficiency or an indefinite matrix).
struct Chol {
  Matrix L;
  bool ok = false;
};
Chol cholesky(const Matrix& A, double rel_tol = 1e-12);
Vector chol_solve(const Chol& C, const Vector& b);
Matrix chol_inverse(const Chol& C);

// Diagonal-pivoted Cholesky rank probe for a PSD matrix: returns the pivot
// columns, in pivot order, that remain above rel_tol * max initial diagonal.
// Columns not returned are linearly dependent on the returned set (at the
// tolerance).
std::vector<std::size_t> psd_pivot_columns(const Matrix& A, double rel_tol);

}  // namespace hwas::la
