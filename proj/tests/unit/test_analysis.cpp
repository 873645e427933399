#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "hints/analysis.hpp"
#include "hints/dataset.hpp"
#include "hints/error.hpp"

using namespace hints;
using namespace hints::analysis;
using discretize::Equation;
using discretize::FieldSample;
using discretize::Grid;
using discretize::ProblemSpec;
using linalg::DenseMatrix;
using linalg::norm2;

namespace {

solver::SolveTrace trace_of(const std::vector<double>& residuals, double f_norm = 1.0) {
  solver::SolveTrace t;
  t.f_norm = f_norm;
  for (std::size_t i = 0; i < residuals.size(); ++i)
    t.records.push_back({i, i == 0 ? solver::StepKind::Init : solver::StepKind::Relax, residuals[i], {}, {}});
  return t;
}

EigenDecomposition eig_of(const discretize::LinearSystem& s) {
  const auto lines = discretize::sign_change_lines(s);
  return linalg::symmetric_eig(s.a.to_dense(), &lines);
}

std::vector<discretize::LinearSystem> poisson_systems(std::size_t count, std::size_t n) {
  return data::draw_systems(data::ProblemFamily::preset("poisson-1d"), Grid::interval(n), 77, 0, count);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("mode decomposition") {
    const auto sys = poisson_systems(1, 20).front();
    const auto eig = eig_of(sys);
    const auto c = mode_decompose(eig.mode(0), eig);
    CHECK(c[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) <= 1e-12);
    RandomStream rng(1, 0);
    for (int t = 0; t < 5; ++t) {
      const auto e = testing::random_vector(rng, sys.size());
      CHECK(testing::max_abs_diff(mode_reconstruct(mode_decompose(e, eig), eig), e) <= 1e-10);
    }
    CHECK_THROWS_AS(mode_decompose(Vector(3, 0.0), eig), Error);
  }

  TEST_CASE("loading vectors") {
    const auto eye = DenseMatrix::identity(3);
    const Vector phi{0.6, 0.0, 0.8};
    CHECK(testing::max_abs_diff(loading_vector(eye, phi), phi) <= 1e-15);
    const auto l = loading_vector(DenseMatrix::from_rows({{2, 0}, {0, 3}}), Vector{1, 0});
    CHECK(l[0] == doctest::Approx(1.0));
    CHECK(l[1] == 0.0);
    RandomStream rng(2, 0);
    const auto a = testing::random_matrix(rng, 6, 6);
    CHECK(norm2(loading_vector(linalg::SparseMatrix::from_dense(a), testing::random_vector(rng, 6))) ==
          doctest::Approx(1.0));
    try {
      loading_vector(DenseMatrix(2, 2), Vector{1, 0});
      FAIL("expected ZeroImage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroImage);
    }
  }

  TEST_CASE("convergence rate") {
    CHECK(convergence_rate(trace_of({2, 2, 2, 2}), 0, 3) == 0.0);
    CHECK(convergence_rate(trace_of({1, 1e-1, 1e-2, 1e-3, 1e-4}), 1, 4) == doctest::Approx(1.0));
    // Scaling invariance.
    CHECK(convergence_rate(trace_of({7, 7e-1, 7e-2, 7e-3, 7e-4}), 0, 4) == doctest::Approx(1.0));
    try {
      convergence_rate(trace_of({1, 0, 0}), 0, 2);
      FAIL("expected NonPositiveResidual");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveResidual);
    }
    CHECK_THROWS_AS(convergence_rate(trace_of({1, 1}), 1, 1), Error);
  }

  TEST_CASE("steady window") {
    std::vector<double> r{1.0, 0.9, 0.8, 0.4, 0.1, 1e-2, 1e-3, 1e-15, 1e-16};
    const auto w = steady_window(trace_of(r), 100);
    CHECK(w.start == 3);
    CHECK(w.end == 6);
    const auto flat = steady_window(trace_of(std::vector<double>(101, 1.0)), 100);
    CHECK(flat.start == 20);
    CHECK(flat.end == 100);
    auto diverged = trace_of({1, 10, 100});
    diverged.status = solver::SolveStatus::Diverged;
    CHECK(steady_rate(diverged, 100) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("mode transfer with an exact solver is zero") {
    const auto systems = poisson_systems(3, 30);
    solver::ExactCorrector exact;
    const auto m = mode_transfer(exact, systems, 10, {1, 2, 3});
    CHECK(m.n_modes == 10);
    CHECK(m.samples == 3);
    for (const auto& row : m.entries) {
      CHECK(row.size() == 10);
      for (double v : row) CHECK((v >= 0.0 && v <= 1e-10));
    }
    const auto csv = m.csv();
    CHECK(csv.rfind("# ", 0) == 0);
    CHECK(csv.find("input_mode,err_mode_1,") != std::string::npos);
    CHECK_THROWS_AS(mode_transfer(exact, systems, 40), Error);
  }

  TEST_CASE("mode transfer of an untrained model and seed-order invariance") {
    const auto systems = poisson_systems(4, 30);
    const deeponet::DeepOnetModel model(deeponet::Architecture::dense_1d(30), Grid::interval(30),
                                        deeponet::MaskKind::Interval, 0, 0, 5);
    const solver::DeepOnetCorrector corrector(model);
    const auto a = mode_transfer(corrector, systems, 6);
    std::vector<discretize::LinearSystem> reversed(systems.rbegin(), systems.rend());
    const auto b = mode_transfer(corrector, reversed, 6);
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t i = 0; i < 6; ++i) {
        CHECK(std::isfinite(a.entries[j][i]));
        CHECK(a.entries[j][i] == doctest::Approx(b.entries[j][i]).epsilon(1e-12));
      }
    // The random net has no idea of phi_1: the output error is of the order of phi_1 itself.
    CHECK(a.entries[0][0] > 0.1);
    CHECK(a.entries[0][0] < 10.0);
  }

  TEST_CASE("rate sweep with one period is a batch of solves") {
    const auto systems = poisson_systems(3, 30);
    solver::ExactCorrector exact;
    solver::SolverConfig base;
    base.kind = solver::SolverKind::HintsJacobi;
    base.max_iterations = 300;
    const std::vector<std::size_t> periods{50};
    const auto r = rate_sweep(systems, exact, periods, base);
    REQUIRE(r.mu.size() == 3);
    for (std::size_t c = 0; c < 3; ++c) {
      auto cfg = base;
      cfg.period = 50;
      const auto s = solver::hints_solve(systems[c], cfg, &exact);
      CHECK(r.mu[c][0] == steady_rate(s.trace, cfg.max_iterations));
      CHECK(r.best_period[c] == 50);
    }
    CHECK(r.converged[0] == 3);
    CHECK(r.best_mean_index() == 0);
    const auto csv = r.csv();
    CHECK(csv.find("\nbest") != std::string::npos);
  }
}
