#include <algorithm>
#include <cmath>
#include <string>

#include "hints/error.hpp"
#include "hints/linalg.hpp"

namespace hints::linalg {

namespace {

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    require(std::isfinite(v), ErrorCode::NonFinite, what);
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require(entries_.size() == rows * cols, ErrorCode::DimensionMismatch,
          "dense matrix entry count " + std::to_string(entries_.size()) + " != " +
              std::to_string(rows) + "x" + std::to_string(cols));
  check_finite(entries_, "dense matrix entries must be finite");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  check_finite(diag, "diagonal entries must be finite");
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, ErrorCode::DimensionMismatch, "ragged row list");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(entries));
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(entries_); }

double DenseMatrix::relative_asymmetry() const {
  require(square(), ErrorCode::DimensionMismatch, "asymmetry of non-square matrix");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  const double scale = frobenius_norm();
  return scale > 0.0 ? worst / scale : worst;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, "matrix product shapes");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "matrix difference shapes");
  std::vector<double> out(a.entries());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.entries()[i];
  return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::DimensionMismatch, "matvec shapes");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Norms norms(std::span<const double> x) {
  Norms n;
  double sum = 0.0;
  for (double v : x) {
    sum += v * v;
    n.linf = std::max(n.linf, std::abs(v));
  }
  n.l2 = std::sqrt(sum);
  return n;
}

double norm2(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return std::sqrt(sum);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch, "dot product sizes");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
  require(lu_.square(), ErrorCode::DimensionMismatch, "LU of non-square matrix");
  const std::size_t n = lu_.rows();
  double max_row_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_row_norm = std::max(max_row_norm, norm2(lu_.row(i)));
  const double threshold = 1e-14 * max_row_norm;

  pivots_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    if (!(best > threshold))
      fail(ErrorCode::SingularMatrix, "pivot " + std::to_string(best) + " at column " + std::to_string(k));
    pivots_[k] = p;
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) / pivot;
      lu_(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const double> f) const {
  const std::size_t n = lu_.rows();
  require(f.size() == n, ErrorCode::DimensionMismatch, "LU solve right-hand side size");
  Vector x(f.begin(), f.end());
  for (std::size_t k = 0; k < n; ++k)
    if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu_(i, k) * x[k];
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= lu_(k, j) * x[j];
    x[k] = s / lu_(k, k);
  }
  return x;
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> f) { return LuFactorization(a).solve(f); }

DenseMatrix cholesky(const DenseMatrix& a) {
  require(a.square(), ErrorCode::DimensionMismatch, "Cholesky of non-square matrix");
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) fail(ErrorCode::NotPositiveDefinite, "Cholesky pivot " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    const auto lj = l.row(j);
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace hints::linalg
