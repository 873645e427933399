#include <algorithm>
#include <cmath>
#include <string>

#include "hints/error.hpp"
#include "hints/linalg.hpp"

namespace hints::linalg {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(row_offsets_.size() == rows_ + 1, ErrorCode::DimensionMismatch, "CSR offsets length");
  require(row_offsets_.front() == 0 && row_offsets_.back() == values_.size(), ErrorCode::InvalidArgument,
          "CSR offsets must start at 0 and end at the value count");
  require(col_indices_.size() == values_.size(), ErrorCode::DimensionMismatch, "CSR index/value counts");
  for (std::size_t i = 0; i < rows_; ++i) {
    require(row_offsets_[i] <= row_offsets_[i + 1], ErrorCode::InvalidArgument, "CSR offsets must be nondecreasing");
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      require(col_indices_[p] < cols_, ErrorCode::DimensionMismatch, "CSR column index out of range");
      if (p > row_offsets_[i])
        require(col_indices_[p - 1] < col_indices_[p], ErrorCode::InvalidArgument,
                "CSR column indices must be strictly increasing in row " + std::to_string(i));
      require(std::isfinite(values_[p]), ErrorCode::NonFinite, "CSR values must be finite");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::size_t> cols_idx;
  std::vector<double> vals;
  cols_idx.reserve(triplets.size());
  vals.reserve(triplets.size());
  std::size_t current_row = 0;
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const auto& tr = triplets[t];
    require(tr.row < rows && tr.col < cols, ErrorCode::DimensionMismatch, "triplet out of range");
    while (current_row < tr.row) offsets[++current_row] = vals.size();
    if (!vals.empty() && offsets[current_row] < vals.size() && cols_idx.back() == tr.col) {
      vals.back() += tr.value;
    } else {
      cols_idx.push_back(tr.col);
      vals.push_back(tr.value);
    }
  }
  while (current_row < rows) offsets[++current_row] = vals.size();
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_idx), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a) {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols_idx;
  std::vector<double> vals;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) {
        cols_idx.push_back(j);
        vals.push_back(a(i, j));
      }
    offsets.push_back(vals.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols_idx), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols_idx(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols_idx[i] = i;
  return SparseMatrix(n, n, std::move(offsets), std::move(cols_idx), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) d(i, col_indices_[p]) = values_[p];
  return d;
}

std::size_t SparseMatrix::bandwidth() const {
  std::size_t b = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const std::size_t j = col_indices_[p];
      b = std::max(b, j > i ? j - i : i - j);
    }
  return b;
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::DimensionMismatch,
          "spmv: matrix has " + std::to_string(a.cols()) + " columns, vector " + std::to_string(x.size()));
  Vector y(a.rows(), 0.0);
  const auto& off = a.row_offsets();
  const auto& idx = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) s += val[p] * x[idx[p]];
    y[i] = s;
  }
  return y;
}

Vector residual(const SparseMatrix& a, std::span<const double> f, std::span<const double> x) {
  require(f.size() == a.rows(), ErrorCode::DimensionMismatch, "residual right-hand side size");
  Vector r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
  return r;
}

Vector direct_solve(const SparseMatrix& a, std::span<const double> f) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "direct solve of non-square matrix");
  require(f.size() == a.rows(), ErrorCode::DimensionMismatch, "direct solve right-hand side size");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const std::size_t b = a.bandwidth();
  // Row i holds columns [i - b, i + 2b]; the extra b columns absorb pivoting fill-in.
  const std::size_t width = 3 * b + 1;
  std::vector<double> band(n * width, 0.0);
  auto slot = [&](std::size_t i, std::size_t j) -> double& { return band[i * width + (j + b - i)]; };

  double max_row_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      slot(i, a.col_indices()[p]) = a.values()[p];
      s += a.values()[p] * a.values()[p];
    }
    max_row_norm = std::max(max_row_norm, std::sqrt(s));
  }
  const double threshold = 1e-14 * max_row_norm;
  Vector x(f.begin(), f.end());

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t last_row = std::min(n - 1, k + b);
    const std::size_t last_col = std::min(n - 1, k + 2 * b);
    std::size_t p = k;
    double best = std::abs(slot(k, k));
    for (std::size_t i = k + 1; i <= last_row; ++i)
      if (std::abs(slot(i, k)) > best) {
        best = std::abs(slot(i, k));
        p = i;
      }
    if (!(best > threshold)) fail(ErrorCode::SingularMatrix, "band pivot at column " + std::to_string(k));
    if (p != k) {
      for (std::size_t j = k; j <= last_col; ++j) std::swap(slot(k, j), slot(p, j));
      std::swap(x[k], x[p]);
    }
    const double pivot = slot(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double m = slot(i, k) / pivot;
      if (m == 0.0) continue;
      slot(i, k) = 0.0;
      for (std::size_t j = k + 1; j <= last_col; ++j) slot(i, j) -= m * slot(k, j);
      x[i] -= m * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t last_col = std::min(n - 1, k + 2 * b);
    double s = x[k];
    for (std::size_t j = k + 1; j <= last_col; ++j) s -= slot(k, j) * x[j];
    x[k] = s / slot(k, k);
  }
  return x;
}

}  // namespace hints::linalg
