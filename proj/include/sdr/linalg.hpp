#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdr/errors.hpp"

namespace sdr {

using Vec = std::vector<double>;

// Dense row-major matrix. Small and value-semantic; everything in this
// toolkit stays at p <= a few hundred, so no blocking or BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// vector helpers
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
Vec operator-(const Vec& a, const Vec& b);
Vec operator+(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix scaled(const Matrix& a, double s);
Vec mat_vec(const Matrix& a, const Vec& x);
Vec tmat_vec(const Matrix& a, const Vec& x);  // a^T x
Matrix outer(const Vec& u, const Vec& v);
Matrix matrix_from_column(const Vec& u);
Vec column(const Matrix& a, std::size_t j);
void set_column(Matrix& a, std::size_t j, const Vec& u);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
bool is_symmetric(const Matrix& a, double rel_tol);
Matrix symmetrized(const Matrix& a);

// Symmetric positive definite wrapper. Construction checks squareness and
// symmetry (relative 1e-12) and stores the symmetrized copy; positive
// definiteness surfaces through cholesky() at the point of use.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m);
  static SpdMatrix identity(std::size_t n) { return SpdMatrix(Matrix::identity(n)); }

  std::size_t dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct EigResult {
  Vec values;      // descending
  Matrix vectors;  // orthonormal columns, matched to values
};

enum class BasisNormalization { NOrthonormal };

// Output of the generalized eigenvalue solve M v = lambda N v. Columns of
// vectors satisfy v_j' N v_j = 1 and v_j' N v_k = 0; values are descending.
struct GevBasis {
  std::size_t dim = 0;
  Matrix vectors;  // p x p
  Vec values;
  BasisNormalization normalization = BasisNormalization::NOrthonormal;
};

// Lower-triangular Cholesky factor, a = L L'. Throws NotPositiveDefinite on a
// nonpositive pivot so callers can decide whether to regularize.
Matrix cholesky(const SpdMatrix& a);

// Cyclic Jacobi eigensolver for symmetric matrices. Converged when the
// off-diagonal Frobenius norm falls to 1e-12 of the input norm; throws
// NoConvergence past 100 sweeps. Eigenvalues descending, ties keep rotation
// order; each eigenvector's largest-magnitude entry is made positive.
EigResult sym_eig(const Matrix& a);

// Reduction to a standard problem: n = L L', solve eig on L^{-1} m L^{-T},
// back-transform v = L^{-T} u. Residual ||M v - lambda N v|| stays at
// 1e-8 ||M||_F per column for well-scaled inputs.
GevBasis gev_solve(const Matrix& m, const SpdMatrix& n);

Matrix spd_inverse(const SpdMatrix& a);

struct SqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};
SqrtPair spd_sqrt_and_invsqrt(const SpdMatrix& a);

// a + gamma I, verified SPD; throws StillSingular when the shift is not
// enough.
SpdMatrix regularize(const Matrix& a, double gamma);

// Returns a as SPD, shifting by gamma only when the plain Cholesky fails or
// force is set. gamma_used (optional) reports the shift actually applied.
SpdMatrix ensure_spd(const Matrix& a, double gamma, bool force, double* gamma_used = nullptr);

// Orthogonal projector b (b'b)^{-1} b' onto the column span of b. The Gram
// matrix must keep its smallest eigenvalue above 1e-10 of the largest, else
// RankDeficient.
Matrix projection_matrix(const Matrix& b);

// Modified Gram-Schmidt with a second pass; drops columns whose residual
// falls under rel_tol of their original norm. Returns p x r, r = rank kept.
Matrix orthonormal_basis(const Matrix& cols, double rel_tol = 1e-8);

// triangular solves with a lower factor
Vec forward_solve(const Matrix& lower, const Vec& b);         // L x = b
Vec backward_solve_transposed(const Matrix& lower, const Vec& b);  // L' x = b
Matrix forward_solve(const Matrix& lower, const Matrix& b);   // L X = B

// Locale-independent formatting with 17 significant digits; round-trips any
// double bit-exactly through parse_double.
std::string format_double(double v);
double parse_double(const std::string& field, std::size_t row, std::size_t col);

void write_matrix_csv(std::ostream& os, const Matrix& a);
Matrix read_matrix_csv(std::istream& is);
void write_matrix_csv_file(const std::string& path, const Matrix& a);
Matrix read_matrix_csv_file(const std::string& path);

}  // namespace sdr
