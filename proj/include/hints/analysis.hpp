#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hints/discretize.hpp"
#include "hints/linalg.hpp"
#include "hints/solver.hpp"

namespace hints::analysis {

using linalg::EigenDecomposition;
using linalg::Vector;

/// Coefficients phi^T e in frequency order.
Vector mode_decompose(std::span<const double> e, const EigenDecomposition& eig);
/// Inverse of mode_decompose.
Vector mode_reconstruct(std::span<const double> coefficients, const EigenDecomposition& eig);

/// A phi / ||A phi||.
Vector loading_vector(const linalg::SparseMatrix& a, std::span<const double> phi);
Vector loading_vector(const linalg::DenseMatrix& a, std::span<const double> phi);

/// Decimal orders of residual decay per iteration between two trace
/// iterations: -log10(r_end / r_start) / (end - start).
double convergence_rate(const solver::SolveTrace& trace, std::size_t start, std::size_t end);

struct SteadyWindow {
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Start: first iteration with ||r|| < 0.5 ||r_0|| (20% of max_iterations if
/// none). End: last iteration with ||r|| above 10 machine epsilon times ||f||.
SteadyWindow steady_window(const solver::SolveTrace& trace, std::size_t max_iterations);

/// Rate over the steady window; -infinity for diverged runs.
double steady_rate(const solver::SolveTrace& trace, std::size_t max_iterations);

/// Geometric-mean frequency response: entries[j][i] is the typical |coefficient|
/// of mode i in the output error when the input is pure mode j (0-based).
struct ModeTransferMatrix {
  std::size_t n_modes = 0;
  std::vector<std::vector<double>> entries;
  std::size_t samples = 0;
  std::vector<std::uint64_t> seeds;

  std::string csv() const;
  void save(const std::filesystem::path& path) const;
};

inline constexpr double kGeometricFloor = 1e-16;

/// For every system and every mode j <= n_modes: input A phi_j through the
/// corrector, error = dv - phi_j, record |mode coefficients| of the error.
ModeTransferMatrix mode_transfer(const solver::Corrector& corrector,
                                 std::span<const discretize::LinearSystem> systems, std::size_t n_modes,
                                 std::vector<std::uint64_t> seeds = {});

struct RateSweepResult {
  std::vector<std::size_t> periods;
  /// mu[c][p]: case c, period index p.
  std::vector<std::vector<double>> mu;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<std::size_t> converged;
  /// Period with the largest mu per case.
  std::vector<std::size_t> best_period;

  /// Index of the largest mean rate.
  std::size_t best_mean_index() const;
  std::string csv() const;
  void save(const std::filesystem::path& path) const;
};

/// Runs hints_solve for every (system, period) pair with `base` otherwise unchanged.
RateSweepResult rate_sweep(std::span<const discretize::LinearSystem> systems, const solver::Corrector& corrector,
                           std::span<const std::size_t> periods, const solver::SolverConfig& base);

}  // namespace hints::analysis
