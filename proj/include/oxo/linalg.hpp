#pragma once

#include <cstddef>
#include <vector>

#include "oxo/error.hpp"

namespace oxo::linalg {

using Vector = std::vector<double>;

// Dense row-major matrix. Everything here targets the desk-scale sizes of the
// online learners (n <= 6), so no effort is spent on blocking or sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  static Matrix scaled_identity(std::size_t n, double s);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);

Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& v, double s);
// y += s * x
void axpy(Vector& y, double s, const Vector& x);

Vector matvec(const Matrix& a, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix outer(const Vector& u, const Vector& v);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
void add_outer_inplace(Matrix& a, const Vector& g, double weight = 1.0);
double trace(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double symmetry_defect(const Matrix& a);
void symmetrize(Matrix& a);

// (A + g g^T)^{-1} from A^{-1} in O(n^2) via the Sherman-Morrison-Woodbury
// identity. The result is re-symmetrized to stop drift over long update runs.
// Throws invalid_input on non-finite entries and degenerate when the
// denominator 1 + g^T A^{-1} g is not positive.
Matrix smw_rank1_inverse_update(const Matrix& a_inv, const Vector& g);

// sqrt(x^T a x) for symmetric PSD a. Throws degenerate when x^T a x < -1e-12.
double weighted_norm(const Matrix& a, const Vector& x);

// Elementwise power of the diagonal; off-diagonals of the result are zero.
// Throws domain on a non-positive diagonal entry.
Matrix diag_power(const Matrix& a, double exponent);

// Dense inverse by Gaussian elimination with partial pivoting.
Matrix invert(const Matrix& a);

// True when a + shift*I admits a Cholesky factorization.
bool cholesky_psd(const Matrix& a, double shift = 1e-9);

struct EigenSym {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors
};

// Cyclic Jacobi eigendecomposition for small symmetric matrices.
EigenSym eigen_sym(const Matrix& a, int max_sweeps = 64);

// Symmetrize then clip negative eigenvalues at zero.
Matrix clip_psd(const Matrix& a);

}  // namespace oxo::linalg
