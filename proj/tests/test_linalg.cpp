#include <doctest.h>

#include <cmath>

#include "oxo/linalg.hpp"
#include "oxo/rng.hpp"

using namespace oxo;
using namespace oxo::linalg;

namespace {

Matrix random_psd_from_updates(RandomSource& rng, std::size_t n, int updates,
                               double eps, std::vector<Vector>* gs = nullptr) {
  Matrix a = Matrix::scaled_identity(n, eps);
  for (int u = 0; u < updates; ++u) {
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-1.0, 1.0);
    add_outer_inplace(a, g);
    if (gs) gs->push_back(g);
  }
  return a;
}

}  // namespace

TEST_CASE("smw matches the rank-one update of the identity") {
  const Matrix r = smw_rank1_inverse_update(Matrix::identity(2), {1.0, 0.0});
  CHECK(r(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("smw with a zero vector is a no-op") {
  RandomSource rng(7);
  const Matrix a = random_psd_from_updates(rng, 3, 4, 0.5);
  const Matrix a_inv = invert(a);
  const Matrix r = smw_rank1_inverse_update(a_inv, Vector(3, 0.0));
  CHECK(max_abs_diff(r, a_inv) <= 1e-14);
}

TEST_CASE("smw tracks the direct dense inverse") {
  RandomSource rng(12345);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3;
    Matrix a = Matrix::scaled_identity(n, 0.3);
    Matrix a_inv = Matrix::scaled_identity(n, 1.0 / 0.3);
    for (int u = 0; u < 8; ++u) {
      Vector g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-1.0, 1.0);
      add_outer_inplace(a, g);
      a_inv = smw_rank1_inverse_update(a_inv, g);
    }
    CHECK(max_abs_diff(a_inv, invert(a)) <= 1e-8);
    CHECK(max_abs_diff(matmul(a_inv, a), Matrix::identity(n)) <= 1e-8);
    CHECK(symmetry_defect(a_inv) <= 1e-12);
  }
}

TEST_CASE("smw rejects bad inputs") {
  CHECK_THROWS_AS(smw_rank1_inverse_update(Matrix::identity(2),
                                           {std::nan(""), 0.0}),
                  Error);
  // A negative "inverse" drives the denominator below zero.
  Matrix neg = Matrix::scaled_identity(2, -1.0);
  CHECK_THROWS_AS(smw_rank1_inverse_update(neg, {2.0, 0.0}), Error);
}

TEST_CASE("weighted norm closed forms") {
  CHECK(weighted_norm(Matrix::identity(2), {3.0, 4.0}) ==
        doctest::Approx(5.0).epsilon(1e-14));
  CHECK(weighted_norm(Matrix::identity(2), {0.0, 0.0}) == 0.0);
  const Matrix a = Matrix::diagonal({4.0, 1.0});
  CHECK(weighted_norm(a, {1.0, 1.0}) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  Matrix indef = Matrix::diagonal({-1.0, 0.0});
  CHECK_THROWS_AS(weighted_norm(indef, {1.0, 0.0}), Error);
}

TEST_CASE("diag_power values and inverse property") {
  const Matrix a = Matrix::diagonal({4.0, 9.0});
  const Matrix half = diag_power(a, 0.5);
  CHECK(half(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(half(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  const Matrix zero = diag_power(a, 0.0);
  CHECK(max_abs_diff(zero, Matrix::identity(2)) == 0.0);
  const Matrix quarter = diag_power(a, 0.25);
  CHECK(quarter(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(quarter(1, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

  RandomSource rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    Vector d(4);
    for (double& v : d) v = rng.uniform(0.1, 10.0);
    const double p = rng.uniform(-2.0, 2.0);
    const Matrix m = Matrix::diagonal(d);
    CHECK(max_abs_diff(matmul(diag_power(m, p), diag_power(m, -p)),
                       Matrix::identity(4)) <= 1e-12);
  }

  Matrix bad = Matrix::diagonal({1.0, 0.0});
  CHECK_THROWS_AS(diag_power(bad, 0.5), Error);
}

TEST_CASE("accumulated rank-one updates stay PSD") {
  RandomSource rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const double eps = rng.uniform(0.1, 2.0);
    const Matrix a = random_psd_from_updates(rng, 4, 30, eps);
    // min eigenvalue >= eps - 1e-9, checked by a shifted Cholesky.
    Matrix shifted = a;
    for (std::size_t i = 0; i < 4; ++i) shifted(i, i) -= eps - 1e-9;
    CHECK(cholesky_psd(shifted, 0.0));
    CHECK(symmetry_defect(a) <= 1e-12);
  }
}

TEST_CASE("smw stays accurate at condition number 1e6") {
  // A = Q diag(1e-6, 1, 2) Q^T built from rank-one updates of 1e-6 I.
  RandomSource rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix a = Matrix::scaled_identity(3, 1e-6);
    Matrix a_inv = Matrix::scaled_identity(3, 1e6);
    for (int u = 0; u < 6; ++u) {
      Vector g(3);
      for (double& v : g) v = rng.uniform(-1.0, 1.0);
      add_outer_inplace(a, g);
      a_inv = smw_rank1_inverse_update(a_inv, g);
    }
    const Matrix prod = matmul(a_inv, a);
    CHECK(max_abs_diff(prod, Matrix::identity(3)) <= 1e-8);
  }
}

TEST_CASE("jacobi eigendecomposition reconstructs the matrix") {
  RandomSource rng(31);
  const Matrix a = random_psd_from_updates(rng, 5, 12, 0.01);
  const EigenSym es = eigen_sym(a);
  Matrix recon(5, 5);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        recon(i, j) += es.values[k] * es.vectors(i, k) * es.vectors(j, k);
  CHECK(max_abs_diff(recon, a) <= 1e-9 * std::max(1.0, max_abs(a)));
  for (std::size_t k = 0; k + 1 < 5; ++k)
    CHECK(es.values[k] <= es.values[k + 1] + 1e-12);
}

TEST_CASE("clip_psd removes negative eigenvalues only") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -0.5;
  const Matrix c = clip_psd(a);
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cholesky_psd(c));

  RandomSource rng(17);
  const Matrix psd = random_psd_from_updates(rng, 3, 6, 0.2);
  CHECK(max_abs_diff(clip_psd(psd), psd) <= 1e-9);
}
