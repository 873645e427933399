#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hints/error.hpp"
#include "hints/linalg.hpp"

namespace hints::linalg {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

std::size_t count_sign_changes(std::span<const double> v, const SignChangeLines& lines) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double zero = 1e-10 * scale;
  std::size_t changes = 0;
  for (const auto& line : lines) {
    int previous = 0;
    for (std::size_t idx : line) {
      const double x = v[idx];
      if (std::abs(x) <= zero) continue;
      const int sign = x > 0.0 ? 1 : -1;
      if (previous != 0 && sign != previous) ++changes;
      previous = sign;
    }
  }
  return changes;
}

EigenDecomposition symmetric_eig(const DenseMatrix& input, const SignChangeLines* lines) {
  require(input.square(), ErrorCode::DimensionMismatch, "eigendecomposition of non-square matrix");
  require(input.relative_asymmetry() <= 1e-12, ErrorCode::NotSymmetric,
          "relative asymmetry " + std::to_string(input.relative_asymmetry()));
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  // Exact symmetrization so rotations see one consistent matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  const double threshold = 1e-12 * input.frobenius_norm();
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        auto row_p = a.row(p);
        auto row_q = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = row_p[k];
          const double aqk = row_q[k];
          row_p[k] = c * apk - s * aqk;
          row_q[k] = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > threshold)
    fail(ErrorCode::NoConvergence, "cyclic Jacobi did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.eigenvalues[c] = a(src, src);
    Vector col = v.column(src);
    const double nrm = norm2(col);
    // Deterministic sign: first significant entry positive.
    double scale = 0.0;
    for (double x : col) scale = std::max(scale, std::abs(x));
    double sign = 1.0;
    for (double x : col)
      if (std::abs(x) > 1e-8 * scale) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, c) = sign * col[k] / nrm;
  }

  SignChangeLines default_lines;
  if (lines == nullptr) {
    default_lines.emplace_back(n);
    std::iota(default_lines.front().begin(), default_lines.front().end(), 0);
    lines = &default_lines;
  }
  std::vector<std::size_t> changes(n);
  for (std::size_t c = 0; c < n; ++c) changes[c] = count_sign_changes(out.eigenvectors.column(c), *lines);
  out.frequency_order.resize(n);
  std::iota(out.frequency_order.begin(), out.frequency_order.end(), 0);
  std::stable_sort(out.frequency_order.begin(), out.frequency_order.end(), [&](std::size_t x, std::size_t y) {
    if (changes[x] != changes[y]) return changes[x] < changes[y];
    return std::abs(out.eigenvalues[x]) < std::abs(out.eigenvalues[y]);
  });
  return out;
}

}  // namespace hints::linalg
