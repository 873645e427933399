#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "hints/linalg.hpp"
#include "hints/random.hpp"

namespace testing {

using hints::linalg::DenseMatrix;
using hints::linalg::Vector;

inline Vector random_vector(hints::RandomStream& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline DenseMatrix random_matrix(hints::RandomStream& rng, std::size_t r, std::size_t c) {
  DenseMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

/// Diagonally dominant matrix: well conditioned and Jacobi/GS-safe.
inline DenseMatrix dominant_matrix(hints::RandomStream& rng, std::size_t n, double fill = 1.0) {
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || rng.uniform() > fill) continue;
      a(i, j) = rng.uniform(-1.0, 1.0);
      s += std::abs(a(i, j));
    }
    a(i, i) = s + 1.0 + rng.uniform();
  }
  return a;
}

inline DenseMatrix random_symmetric(hints::RandomStream& rng, std::size_t n) {
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  return a;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* base = std::getenv("HINTS_TEST_TMP");
  auto dir = std::filesystem::path(base ? base : "/tmp/hints_tests") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
