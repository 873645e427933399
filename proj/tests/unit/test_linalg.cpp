#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "hints/discretize.hpp"
#include "hints/error.hpp"
#include "hints/grf.hpp"
#include "hints/linalg.hpp"

using namespace hints;
using namespace hints::linalg;
using testing::max_abs_diff;

TEST_SUITE("linalg") {
  TEST_CASE("dense constructor rejects non-finite and mis-sized entries") {
    CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, std::nan("")}), Error);
    CHECK_THROWS_AS(DenseMatrix(1, 1, {INFINITY}), Error);
  }

  TEST_CASE("sparse storage invariants") {
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), Error);  // decreasing columns
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1, 1}, {0, 1}, {1.0, 1.0}), Error);  // last offset
    const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, -1.0}});
    CHECK(a.at(0, 0) == 3.0);
    CHECK(a.at(1, 0) == -1.0);
    CHECK(a.at(1, 1) == 0.0);
    CHECK(a.nonzeros() == 2);
  }

  TEST_CASE("spmv: identity, zero and dense equivalence") {
    RandomStream rng(1, 0);
    const auto x = testing::random_vector(rng, 20);
    CHECK(spmv(SparseMatrix::identity(20), x) == x);
    const SparseMatrix zero(20, 20, std::vector<std::size_t>(21, 0), {}, {});
    CHECK(spmv(zero, x) == Vector(20, 0.0));
    for (int trial = 0; trial < 10; ++trial) {
      DenseMatrix d(20, 20);
      for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j)
          if (rng.uniform() < 0.3) d(i, j) = rng.uniform(-1.0, 1.0);
      const auto s = SparseMatrix::from_dense(d);
      CHECK(max_abs_diff(spmv(s, x), matvec(d, x)) <= 1e-12);
      CHECK(s.to_dense().entries() == d.entries());
    }
    CHECK_THROWS_AS(spmv(zero, Vector(3, 0.0)), Error);
  }

  TEST_CASE("norms") {
    const auto n = norms(Vector{3.0, 4.0});
    CHECK(n.l2 == 5.0);
    CHECK(n.linf == 4.0);
    const auto z = norms(Vector(4, 0.0));
    CHECK(z.l2 == 0.0);
    CHECK(z.linf == 0.0);
    RandomStream rng(2, 0);
    const auto v = testing::random_vector(rng, 100);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    CHECK(std::abs(norm2(v) * norm2(v) - sq) <= 1e-12);
  }

  TEST_CASE("lu_solve examples") {
    CHECK(lu_solve(DenseMatrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
    const auto x = lu_solve(DenseMatrix::from_rows({{2, 0}, {0, 4}}), Vector{2, 8});
    CHECK(x == Vector{1, 2});
    RandomStream rng(3, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = testing::dominant_matrix(rng, 10);
      const auto xs = testing::random_vector(rng, 10);
      CHECK(max_abs_diff(lu_solve(a, matvec(a, xs)), xs) <= 1e-9);
    }
  }

  TEST_CASE("lu_solve residual bound on general random matrices") {
    RandomStream rng(4, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = testing::random_matrix(rng, 30, 30);
      const auto f = testing::random_vector(rng, 30);
      const auto x = lu_solve(a, f);
      const auto r = residual(SparseMatrix::from_dense(a), f, x);
      CHECK(norm2(r) <= 1e-10 * (a.frobenius_norm() * norm2(x) + norm2(f)));
    }
  }

  TEST_CASE("lu_solve flags singular matrices") {
    const auto a = DenseMatrix::from_rows({{1, 2}, {2, 4}});
    try {
      lu_solve(a, Vector{1, 1});
      FAIL("expected SingularMatrix");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularMatrix);
    }
  }

  TEST_CASE("banded direct solve agrees with dense LU") {
    RandomStream rng(5, 0);
    const std::size_t n = 40;
    std::vector<SparseMatrix::Triplet> t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = (i >= 3 ? i - 3 : 0); j < std::min(n, i + 4); ++j)
        t.push_back({i, j, i == j ? 0.1 : rng.uniform(-1.0, 1.0)});  // weak diagonal forces pivoting
    const auto a = SparseMatrix::from_triplets(n, n, t);
    const auto f = testing::random_vector(rng, n);
    CHECK(max_abs_diff(direct_solve(a, f), lu_solve(a.to_dense(), f)) <= 1e-8);
  }

  TEST_CASE("cholesky reproduces SPD matrices and rejects indefinite ones") {
    RandomStream rng(6, 0);
    const auto b = testing::random_matrix(rng, 12, 12);
    auto a = b * b.transpose();
    for (std::size_t i = 0; i < 12; ++i) a(i, i) += 1.0;
    const auto l = cholesky(a);
    const auto diff = l * l.transpose() - a;
    CHECK(diff.frobenius_norm() <= 1e-12 * a.frobenius_norm());
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = i + 1; j < 12; ++j) CHECK(l(i, j) == 0.0);
    try {
      cholesky(DenseMatrix::from_rows({{1, 2}, {2, 1}}));
      FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
  }

  TEST_CASE("symmetric_eig on a diagonal matrix") {
    const auto eig = symmetric_eig(DenseMatrix::diagonal(Vector{3, 1, 2}));
    CHECK(eig.eigenvalues == Vector{1, 2, 3});
    CHECK(eig.eigenvector(0) == Vector{0, 1, 0});
    CHECK(eig.eigenvector(1) == Vector{0, 0, 1});
    CHECK(eig.eigenvector(2) == Vector{1, 0, 0});
  }

  TEST_CASE("symmetric_eig: analytic Dirichlet Laplacian spectrum and frequency order") {
    const std::size_t n = 10;
    const double h = 1.0 / 11.0;
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, i) = 2.0 / (h * h);
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0 / (h * h);
    }
    const auto eig = symmetric_eig(a);
    for (std::size_t j = 1; j <= n; ++j) {
      const double s = std::sin(static_cast<double>(j) * std::numbers::pi * h / 2.0);
      CHECK(std::abs(eig.eigenvalues[j - 1] - 4.0 / (h * h) * s * s) <= 1e-8 * 4.0 / (h * h));
    }
    for (std::size_t m = 0; m < n; ++m) {
      CHECK(eig.frequency_order[m] == m);
      CHECK(count_sign_changes(eig.mode(m), SignChangeLines{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}) == m);
    }
  }

  TEST_CASE("symmetric_eig invariants on random symmetric matrices") {
    RandomStream rng(7, 0);
    for (std::size_t n : {1u, 2u, 7u, 25u}) {
      const auto a = testing::random_symmetric(rng, n);
      const auto eig = symmetric_eig(a);
      const double fa = a.frobenius_norm();
      std::vector<char> seen(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = eig.eigenvector(i);
        const auto av = matvec(a, v);
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k) r += (av[k] - eig.eigenvalues[i] * v[k]) * (av[k] - eig.eigenvalues[i] * v[k]);
        CHECK(std::sqrt(r) <= 1e-9 * fa);
        for (std::size_t j = 0; j < n; ++j) {
          const double d = dot(v, eig.eigenvector(j));
          CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
        if (i > 0) CHECK(eig.eigenvalues[i - 1] <= eig.eigenvalues[i]);
        seen.at(eig.frequency_order[i]) = 1;
      }
      for (char s : seen) CHECK(s == 1);
    }
  }

  TEST_CASE("symmetric_eig rejects asymmetric input") {
    try {
      symmetric_eig(DenseMatrix::from_rows({{1, 2}, {0, 1}}));
      FAIL("expected NotSymmetric");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSymmetric);
    }
  }

  TEST_CASE("FEM Poisson matrix with random k: eigen reconstruction") {
    using namespace hints::discretize;
    grf::GrfConfig kc;
    kc.mean = 1.0;
    kc.sigma = 0.3;
    kc.length_scale = 0.1;
    kc.k_min = 0.3;
    kc.seed = 11;
    const auto grid = Grid::interval(30);
    const auto k = grf::GaussianRandomField(grid, kc).draw(0);
    const auto sys = assemble(ProblemSpec(Equation::Poisson, k, FieldSample::constant(grid, 1.0)), grid);
    const auto a = sys.a.to_dense();
    const auto eig = symmetric_eig(a);
    const auto lam = DenseMatrix::diagonal(eig.eigenvalues);
    const auto rec = eig.eigenvectors * lam * eig.eigenvectors.transpose();
    CHECK((rec - a).frobenius_norm() <= 1e-9 * a.frobenius_norm());
  }
}
