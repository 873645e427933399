#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "hints/discretize.hpp"
#include "hints/error.hpp"
#include "hints/linalg.hpp"
#include "hints/solver.hpp"

using namespace hints;
using namespace hints::solver;
using discretize::Equation;
using discretize::FieldSample;
using discretize::Grid;
using discretize::ProblemSpec;
using linalg::norm2;

namespace {

discretize::LinearSystem poisson_1d(std::size_t n, double k = 1.0) {
  const auto g = Grid::interval(n);
  return discretize::assemble(ProblemSpec(Equation::Poisson, FieldSample::constant(g, k), FieldSample::constant(g, 1.0)),
                              g);
}

discretize::LinearSystem helmholtz_1d(std::size_t n, double k) {
  const auto g = Grid::interval(n);
  return discretize::assemble(
      ProblemSpec(Equation::Helmholtz, FieldSample::constant(g, k), FieldSample::constant(g, 1.0)), g);
}

// Power iteration; G is similar to a symmetric matrix, so this finds max |eigenvalue|.
double spectral_radius(const DenseMatrix& g) {
  linalg::Vector v(g.rows(), 1.0);
  double r = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const auto w = linalg::matvec(g, linalg::matvec(g, v));
    r = std::sqrt(norm2(w) / norm2(v));
    const double s = norm2(w);
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / s;
  }
  return r;
}

// D^{-1/2} A D^{-1/2}: symmetric with the spectrum of D^{-1} A.
DenseMatrix jacobi_similar(const DenseMatrix& a) {
  DenseMatrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      s(i, j) = a(i, j) / std::sqrt(std::abs(a(i, i)) * std::abs(a(j, j)));
  return s;
}

SolverConfig classical(SolverKind kind, std::size_t iterations) {
  SolverConfig c;
  c.kind = kind;
  c.max_iterations = iterations;
  c.tolerance = 1e-300;
  return c;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("jacobi_step examples") {
    const auto eye = linalg::SparseMatrix::from_dense(DenseMatrix::identity(3));
    const Vector v{3.0, -6.0, 9.0};
    const auto a1 = jacobi_step(eye, Vector(3, 0.0), v, 2.0 / 3.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a1[i] == doctest::Approx(v[i] / 3.0).epsilon(1e-15));
    const Vector f{1.0, 2.0, 3.0};
    CHECK(jacobi_step(eye, f, v, 1.0) == f);
    const auto a = linalg::SparseMatrix::from_dense(DenseMatrix::from_rows({{2, 1}, {1, 2}}));
    const auto r = jacobi_step(a, Vector{3, 3}, Vector{0, 0}, 2.0 / 3.0);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));
    const auto z = linalg::SparseMatrix::from_dense(DenseMatrix::from_rows({{0, 1}, {1, 2}}));
    try {
      jacobi_step(z, Vector{1, 1}, Vector{0, 0}, 1.0);
      FAIL("expected ZeroDiagonal");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroDiagonal);
    }
    CHECK_THROWS_AS(gs_step(z, Vector{1, 1}, Vector{0, 0}), Error);
  }

  TEST_CASE("gs_step examples") {
    const auto a = linalg::SparseMatrix::from_dense(DenseMatrix::from_rows({{2, 1}, {1, 2}}));
    const auto r = gs_step(a, Vector{3, 3}, Vector{0, 0});
    CHECK(r[0] == doctest::Approx(1.5));
    CHECK(r[1] == doctest::Approx(0.75));
    RandomStream rng(2, 0);
    DenseMatrix lower(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j <= i; ++j) lower(i, j) = i == j ? 2.0 + rng.uniform() : rng.uniform(-1.0, 1.0);
    const auto ls = linalg::SparseMatrix::from_dense(lower);
    const auto f = testing::random_vector(rng, 6);
    const auto v = gs_step(ls, f, testing::random_vector(rng, 6));
    CHECK(norm2(linalg::residual(ls, f, v)) <= 1e-14);
  }

  TEST_CASE("amplification matrix matches one step on the error") {
    RandomStream rng(3, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform() * 60);
      const auto dense = testing::dominant_matrix(rng, n, 0.3);
      const auto a = linalg::SparseMatrix::from_dense(dense);
      const auto u = testing::random_vector(rng, n);
      const auto f = linalg::spmv(a, u);
      const auto v = testing::random_vector(rng, n);
      Vector e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = v[i] - u[i];
      for (double omega : {2.0 / 3.0, 1.0}) {
        const auto gj = amplification_matrix(dense, omega, Splitting::Jacobi);
        const auto vj = jacobi_step(a, f, v, omega);
        const auto ej = linalg::matvec(gj, e);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(vj[i] - u[i] - ej[i]) <= 1e-12);
      }
      const auto gg = amplification_matrix(dense, 1.0, Splitting::GaussSeidel);
      const auto vg = gs_step(a, f, v);
      const auto eg = linalg::matvec(gg, e);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(vg[i] - u[i] - eg[i]) <= 1e-12);
    }
    const auto g = amplification_matrix(DenseMatrix::identity(4), 2.0 / 3.0, Splitting::Jacobi);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? 1.0 / 3.0 : 0.0));
    try {
      amplification_matrix(DenseMatrix::from_rows({{0, 1}, {1, 0}}), 1.0, Splitting::Jacobi);
      FAIL("expected SingularSplitting");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularSplitting);
    }
  }

  TEST_CASE("Jacobi spectral radius: Poisson below 1, Helmholtz above") {
    // Eigenvalues of G = I - w D^{-1} A are 1 - w mu with mu from the symmetric similar form.
    auto rho = [](const discretize::LinearSystem& s, double omega) {
      const auto eig = linalg::symmetric_eig(jacobi_similar(s.a.to_dense()));
      double r = 0.0;
      for (double mu : eig.eigenvalues) r = std::max(r, std::abs(1.0 - omega * mu));
      return r;
    };
    const auto p = poisson_1d(30);
    const double rp = rho(p, 2.0 / 3.0);
    CHECK(rp < 1.0);
    CHECK(rp == doctest::Approx(spectral_radius(amplification_matrix(p.a.to_dense(), 2.0 / 3.0, Splitting::Jacobi))).epsilon(1e-6));
    CHECK(rho(helmholtz_1d(30, 8.0), 2.0 / 3.0) > 1.0);
  }

  TEST_CASE("restriction and prolongation") {
    const Vector c(15, 2.5);
    for (double v : restrict_full_weighting(c, 1)) CHECK(v == doctest::Approx(2.5));
    Vector impulse(15, 0.0);
    impulse[5] = 1.0;  // coarse node 2 sits on fine node 5
    const auto r = restrict_full_weighting(impulse, 1);
    REQUIRE(r.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(r[i] == (i == 2 ? 0.5 : 0.0));
    CHECK(prolong_linear(Vector(49, 1.0), 2).size() == 15 * 15);
    CHECK_THROWS_AS(restrict_full_weighting(Vector(14, 0.0), 1), Error);
    CHECK_THROWS_AS(restrict_full_weighting(Vector(15 * 14, 0.0), 2), Error);

    // Smooth vector of 63 interior nodes on n = 64.
    const std::size_t n = 64;
    Vector s(n - 1);
    for (std::size_t i = 0; i < n - 1; ++i) s[i] = std::sin(std::numbers::pi * static_cast<double>(i + 1) / n);
    const auto pr = prolong_linear(restrict_full_weighting(s, 1), 1);
    CHECK(testing::max_abs_diff(pr, s) <= 0.02);

    // Prolongation is the transpose of restriction scaled by 2 per axis.
    RandomStream rng(4, 0);
    for (int dim = 1; dim <= 2; ++dim) {
      const std::size_t fine = dim == 1 ? 15 : 15 * 15;
      const std::size_t coarse = dim == 1 ? 7 : 49;
      const auto x = testing::random_vector(rng, fine);
      const auto y = testing::random_vector(rng, coarse);
      const double lhs = linalg::dot(restrict_full_weighting(x, dim), y);
      const double rhs = linalg::dot(x, prolong_linear(y, dim));
      CHECK(rhs == doctest::Approx(lhs * (dim == 1 ? 2.0 : 4.0)).epsilon(1e-12));
    }
  }

  TEST_CASE("V-cycle") {
    const auto sys = poisson_1d(64);
    SolverConfig cfg = classical(SolverKind::Multigrid, 1);
    cfg.levels = 3;
    cfg.relaxations = 3;
    Hierarchy h(sys, 3, cfg.direct_limit);
    CHECK(h.levels() == 3);
    CHECK(h.system(2).size() == 15);
    Vector v(sys.size(), 0.0);
    double prev = norm2(sys.f);
    for (int c = 0; c < 8; ++c) {
      v = v_cycle(h, sys.f, v, cfg);
      const double r = norm2(linalg::residual(sys.a, sys.f, v));
      CHECK(r <= 0.2 * prev);
      prev = r;
    }

    // One level is 2 n_rl relaxations.
    Hierarchy one(sys, 1, cfg.direct_limit);
    cfg.levels = 1;
    Vector w(sys.size(), 0.0);
    for (int i = 0; i < 6; ++i) w = jacobi_step(sys.a, sys.f, w, cfg.omega);
    CHECK(v_cycle(one, sys.f, Vector(sys.size(), 0.0), cfg) == w);

    // Gauss-Seidel smoothing also contracts.
    cfg.levels = 3;
    cfg.smoother = Splitting::GaussSeidel;
    const auto g1 = v_cycle(h, sys.f, Vector(sys.size(), 0.0), cfg);
    CHECK(norm2(linalg::residual(sys.a, sys.f, g1)) <= 0.2 * norm2(sys.f));
  }

  TEST_CASE("hints_solve: classical runs and trace") {
    const auto sys = poisson_1d(30);
    auto cfg = classical(SolverKind::Jacobi, 50);
    const auto j = hints_solve(sys, cfg);
    CHECK(j.trace.records.size() == 51);
    CHECK(j.trace.records.front().kind == StepKind::Init);
    CHECK(j.trace.records[0].res_l2 == doctest::Approx(norm2(sys.f)));
    Vector v(sys.size(), 0.0);
    for (int i = 0; i < 50; ++i) v = jacobi_step(sys.a, sys.f, v, cfg.omega);
    CHECK(j.v == v);
    CHECK(j.trace.status == SolveStatus::MaxIterations);
    for (std::size_t i = 6; i < j.trace.records.size(); ++i)
      CHECK(j.trace.records[i].res_l2 <= j.trace.records[i - 1].res_l2 * (1.0 + 1e-12));

    cfg.tolerance = 1e-8;
    cfg.kind = SolverKind::GaussSeidel;
    cfg.max_iterations = 100000;
    const auto gs = hints_solve(sys, cfg);
    CHECK(gs.trace.status == SolveStatus::Converged);
    CHECK(gs.trace.final_residual() <= 1e-8 * norm2(sys.f));

    const auto csv = j.trace.csv();
    CHECK(csv.substr(0, csv.find('\n')) == "iter,step_kind,res_l2,err_l2");
    CHECK(csv.find("\n1,relax,") != std::string::npos);
  }

  TEST_CASE("hints_solve: zero forcing, divergence and config errors") {
    const auto g = Grid::interval(30);
    const auto zero = discretize::assemble(
        ProblemSpec(Equation::Poisson, FieldSample::constant(g, 1.0), FieldSample::constant(g, 0.0)), g);
    const auto z = hints_solve(zero, classical(SolverKind::Jacobi, 10));
    CHECK(z.trace.status == SolveStatus::Converged);
    CHECK(z.trace.iterations() == 0);

    const auto helm = helmholtz_1d(30, 8.0);
    const auto d = hints_solve(helm, classical(SolverKind::Jacobi, 5000));
    CHECK(d.trace.status == SolveStatus::Diverged);
    CHECK(d.trace.iterations() < 5000);

    auto bad = classical(SolverKind::HintsJacobi, 10);
    bad.period = 10;
    try {
      hints_solve(zero, bad);
      FAIL("expected ModelMissing");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ModelMissing);
    }
    bad.period = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.period = 5;
    bad.omega = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(parse_solver_kind("HINTS-MG") == SolverKind::HintsMultigrid);
    CHECK(to_string(SolverKind::GaussSeidel) == "GS");
    CHECK_THROWS_AS(parse_solver_kind("CG"), Error);
  }

  TEST_CASE("hybrid with a period that never fires is the classical solver") {
    const auto sys = poisson_1d(30, 1.3);
    ExactCorrector exact;
    const std::pair<SolverKind, SolverKind> pairs[] = {{SolverKind::Jacobi, SolverKind::HintsJacobi},
                                                        {SolverKind::GaussSeidel, SolverKind::HintsGaussSeidel},
                                                        {SolverKind::Multigrid, SolverKind::HintsMultigrid}};
    for (const auto& [base, hybrid] : pairs) {
      auto c = classical(base, 30);
      c.levels = 2;
      const auto a = hints_solve(sys, c);
      c.kind = hybrid;
      c.period = kNever;
      const auto b = hints_solve(sys, c, &exact);
      CHECK(a.trace.csv() == b.trace.csv());
      CHECK(a.v == b.v);
      CHECK(b.trace.deeponet_calls == 0);
    }
  }

  TEST_CASE("hybrid with an exact corrector") {
    const auto sys = poisson_1d(30, 1.3);
    ExactCorrector exact;
    auto c = classical(SolverKind::HintsJacobi, 200);
    c.period = 5;
    c.tolerance = 1e-12;
    const auto u = linalg::direct_solve(sys.a, sys.f);
    const Truth truth{u, nullptr};
    const auto r = hints_solve(sys, c, &exact, &truth);
    CHECK(r.trace.status == SolveStatus::Converged);
    CHECK(r.trace.iterations() == 5);
    CHECK(r.trace.records[5].kind == StepKind::DeepOnet);
    CHECK(r.trace.deeponet_calls == 1);
    CHECK(r.trace.records.back().err_l2.value() <= 1e-10 * norm2(u));
  }

  TEST_CASE("mode-wise Jacobi decay matches the amplification factor") {
    const auto sys = poisson_1d(30);
    const auto dense = sys.a.to_dense();
    const auto lines = discretize::sign_change_lines(sys);
    const auto eig = linalg::symmetric_eig(dense, &lines);
    const double d = dense(0, 0);  // constant diagonal, so D^{-1} A shares eigenvectors with A
    auto cfg = classical(SolverKind::Jacobi, 150);
    cfg.tracked_modes = {1, 5, 10};
    const Truth truth{linalg::direct_solve(sys.a, sys.f), &eig};
    const auto res = hints_solve(sys, cfg, nullptr, &truth);
    for (std::size_t m = 0; m < 3; ++m) {
      const std::size_t mode = cfg.tracked_modes[m] - 1;
      const double factor = std::abs(1.0 - cfg.omega * eig.mode_eigenvalue(mode) / d);
      for (std::size_t it = 51; it <= 150; ++it) {
        const double prev = std::abs(res.trace.records[it - 1].modes[m]);
        const double cur = std::abs(res.trace.records[it].modes[m]);
        if (prev < 1e-13) continue;
        CHECK(std::abs(cur / prev - factor) <= 0.05 * factor);
      }
    }
  }
}
