#include <cmath>
#include <random>

#include "doctest.h"
#include "hwas/la.hpp"

using namespace hwas;

TEST_CASE("cholesky solves SPD systems") {
  la::Matrix A(3, 3);
  // SPD: B'B + I with B simple
  double B[3][3] = {{1, 2, 0}, {0, 1, 1}, {2, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = (i == j) ? 1.0 : 0.0;
      for (int k = 0; k < 3; ++k) s += B[k][i] * B[k][j];
      A(i, j) = s;
    }
  la::Chol C = la::cholesky(A);
  REQUIRE(C.ok);
  la::Vector b = {1.0, -2.0, 0.5};
  la::Vector x = la::chol_solve(C, b);
  la::Vector Ax = la::matvec(A, x);
  for (int i = 0; i < 3; ++i) CHECK(Ax[i] == doctest::Approx(b[i]).epsilon(1e-12));

  la::Matrix inv = la::chol_inverse(C);
  la::Vector e = la::matvec(inv, b);
  for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("cholesky rejects rank-deficient matrices") {
  la::Matrix A(2, 2);
  A(0, 0) = 1.0;
  A(0, 1) = 2.0;
  A(1, 0) = 2.0;
  A(1, 1) = 4.0;  // rank 1
  la::Chol C = la::cholesky(A, 1e-12);
  CHECK_FALSE(C.ok);
}

TEST_CASE("psd pivot columns find the identifiable subset") {
  // column 2 = column 0 + column 1 in the generating design
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  la::Matrix X(40, 3);
  for (std::size_t i = 0; i < 40; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    X(i, 2) = X(i, 0) + X(i, 1);
  }
  la::Matrix G = la::gram(X, nullptr);
  auto cols = la::psd_pivot_columns(G, 1e-9);
  CHECK(cols.size() == 2);

  la::Matrix full = la::gram(X, nullptr);
  // keep only first two columns: full rank
  la::Matrix G2(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) G2(i, j) = full(i, j);
  CHECK(la::psd_pivot_columns(G2, 1e-9).size() == 2);
}

TEST_CASE("quad form matches direct expansion") {
  la::Matrix A(2, 2);
  A(0, 0) = 2.0;
  A(0, 1) = 0.5;
  A(1, 0) = 0.5;
  A(1, 1) = 3.0;
  la::Vector d = {1.0, -2.0};
  // 2*1 + 2*0.5*1*(-2) + 3*4 = 2 - 2 + 12
  CHECK(la::quad_form(A, d) == doctest::Approx(12.0));
}
