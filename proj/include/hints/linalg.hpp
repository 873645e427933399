#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hints::linalg {

using Vector = std::vector<double>;

/// Row-major dense matrix of finite doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  const std::vector<double>& entries() const noexcept { return entries_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  /// max |a_ij - a_ji| / max(||A||_F, tiny)
  double relative_asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);

/// Compressed sparse row matrix; column indices strictly increasing per row.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  /// Duplicate coordinates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  /// Stores only nonzero entries.
  static SparseMatrix from_dense(const DenseMatrix& a);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Entry lookup by binary search; zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  Vector diagonal() const;
  DenseMatrix to_dense() const;
  /// Half-bandwidth: max |i - j| over stored entries.
  std::size_t bandwidth() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);
/// f - A x
Vector residual(const SparseMatrix& a, std::span<const double> f, std::span<const double> x);

struct Norms {
  double l2 = 0.0;
  double linf = 0.0;
};
Norms norms(std::span<const double> x);
double norm2(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

/// LU factorization with partial pivoting, reusable across right-hand sides.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a);
  Vector solve(std::span<const double> f) const;
  std::size_t size() const noexcept { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> pivots_;
};

Vector lu_solve(const DenseMatrix& a, std::span<const double> f);

/// Direct solve of a banded sparse system by band LU with partial pivoting.
Vector direct_solve(const SparseMatrix& a, std::span<const double> f);

/// Lower-triangular L with L L^T = A.
DenseMatrix cholesky(const DenseMatrix& a);

/// Index sequences along which eigenvector sign changes are counted.
/// A 1D grid is a single line; a 2D lattice lists every row and column.
using SignChangeLines = std::vector<std::vector<std::size_t>>;

struct EigenDecomposition {
  Vector eigenvalues;               // ascending
  DenseMatrix eigenvectors;         // column i pairs with eigenvalues[i]
  std::vector<std::size_t> frequency_order;  // frequency_order[m] = column of the m-th lowest-frequency mode

  Vector eigenvector(std::size_t column) const { return eigenvectors.column(column); }
  /// Eigenvector of the mode with 0-based frequency rank m.
  Vector mode(std::size_t m) const { return eigenvectors.column(frequency_order.at(m)); }
  double mode_eigenvalue(std::size_t m) const { return eigenvalues.at(frequency_order.at(m)); }
};

std::size_t count_sign_changes(std::span<const double> v, const SignChangeLines& lines);

/// Cyclic Jacobi eigensolver for symmetric matrices. Frequency order is
/// ascending sign-change count along `lines` (default: index order),
/// ties broken by ascending |lambda|.
EigenDecomposition symmetric_eig(const DenseMatrix& a, const SignChangeLines* lines = nullptr);

}  // namespace hints::linalg
