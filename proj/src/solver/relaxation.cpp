#include <cmath>

#include "hints/error.hpp"
#include "hints/solver.hpp"

namespace hints::solver {

namespace {

void check_system(const SparseMatrix& a, std::span<const double> f, std::span<const double> v) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "relaxation needs a square matrix");
  require(f.size() == a.rows() && v.size() == a.rows(), ErrorCode::DimensionMismatch,
          "relaxation vector sizes do not match the matrix");
}

}  // namespace

Vector jacobi_step(const SparseMatrix& a, std::span<const double> f, std::span<const double> v, double omega) {
  check_system(a, f, v);
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& val = a.values();
  Vector out(v.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      if (ci[p] == i)
        diag = val[p];
      else
        off += val[p] * v[ci[p]];
    }
    require(diag != 0.0, ErrorCode::ZeroDiagonal, "zero diagonal in row " + std::to_string(i));
    out[i] = (1.0 - omega) * v[i] - omega * off / diag + omega * f[i] / diag;
  }
  return out;
}

Vector gs_step(const SparseMatrix& a, std::span<const double> f, std::span<const double> v) {
  check_system(a, f, v);
  const auto& rp = a.row_offsets();
  const auto& ci = a.col_indices();
  const auto& val = a.values();
  Vector out(v.begin(), v.end());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double diag = 0.0;
    double s = f[i];
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      if (ci[p] == i)
        diag = val[p];
      else
        s -= val[p] * out[ci[p]];
    }
    require(diag != 0.0, ErrorCode::ZeroDiagonal, "zero diagonal in row " + std::to_string(i));
    out[i] = s / diag;
  }
  return out;
}

DenseMatrix amplification_matrix(const DenseMatrix& a, double omega, Splitting splitting) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "amplification matrix needs a square matrix");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    require(a(i, i) != 0.0, ErrorCode::SingularSplitting, "splitting matrix is singular");
  // Column by column: X = M^{-1} A.
  DenseMatrix g = DenseMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = a(i, j);
      if (splitting == Splitting::GaussSeidel)
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * x[k];
      x[i] = s / a(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) g(i, j) -= omega * x[i];
  }
  return g;
}

Vector restrict_full_weighting(std::span<const double> fine, int dimension) {
  if (dimension == 1) {
    require(fine.size() % 2 == 1 && fine.size() >= 3, ErrorCode::SizeMismatch,
            "restriction needs 2m+1 fine unknowns");
    const std::size_t m = (fine.size() - 1) / 2;
    Vector c(m);
    for (std::size_t i = 0; i < m; ++i) c[i] = 0.25 * fine[2 * i] + 0.5 * fine[2 * i + 1] + 0.25 * fine[2 * i + 2];
    return c;
  }
  require(dimension == 2, ErrorCode::InvalidArgument, "restriction supports 1D and 2D");
  const auto nf = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(fine.size()))));
  require(nf * nf == fine.size() && nf % 2 == 1 && nf >= 3, ErrorCode::SizeMismatch,
          "2D restriction needs (2m+1)^2 fine unknowns");
  const std::size_t m = (nf - 1) / 2;
  static constexpr double w[3] = {0.25, 0.5, 0.25};
  Vector c(m * m, 0.0);
  for (std::size_t iy = 0; iy < m; ++iy)
    for (std::size_t ix = 0; ix < m; ++ix) {
      double s = 0.0;
      for (std::size_t dy = 0; dy < 3; ++dy)
        for (std::size_t dx = 0; dx < 3; ++dx) s += w[dy] * w[dx] * fine[(2 * iy + dy) * nf + 2 * ix + dx];
      c[iy * m + ix] = s;
    }
  return c;
}

Vector prolong_linear(std::span<const double> coarse, int dimension) {
  if (dimension == 1) {
    const std::size_t m = coarse.size();
    require(m >= 1, ErrorCode::SizeMismatch, "prolongation needs at least one coarse unknown");
    Vector f(2 * m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      f[2 * i + 1] += coarse[i];
      f[2 * i] += 0.5 * coarse[i];
      f[2 * i + 2] += 0.5 * coarse[i];
    }
    return f;
  }
  require(dimension == 2, ErrorCode::InvalidArgument, "prolongation supports 1D and 2D");
  const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(coarse.size()))));
  require(m * m == coarse.size() && m >= 1, ErrorCode::SizeMismatch, "2D prolongation needs m^2 coarse unknowns");
  const std::size_t nf = 2 * m + 1;
  static constexpr double w[3] = {0.5, 1.0, 0.5};
  Vector f(nf * nf, 0.0);
  for (std::size_t iy = 0; iy < m; ++iy)
    for (std::size_t ix = 0; ix < m; ++ix) {
      const double c = coarse[iy * m + ix];
      for (std::size_t dy = 0; dy < 3; ++dy)
        for (std::size_t dx = 0; dx < 3; ++dx) f[(2 * iy + dy) * nf + 2 * ix + dx] += w[dy] * w[dx] * c;
    }
  return f;
}

}  // namespace hints::solver
