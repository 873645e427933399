#include "hints/analysis.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "hints/error.hpp"
#include "hints/io.hpp"
#include "hints/parallel.hpp"

namespace hints::analysis {

Vector mode_decompose(std::span<const double> e, const EigenDecomposition& eig) {
  const std::size_t n = eig.eigenvectors.rows();
  require(e.size() == n, ErrorCode::DimensionMismatch, "vector does not match the eigenbasis");
  Vector c(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t col = eig.frequency_order[m];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += eig.eigenvectors(i, col) * e[i];
    c[m] = s;
  }
  return c;
}

Vector mode_reconstruct(std::span<const double> coefficients, const EigenDecomposition& eig) {
  const std::size_t n = eig.eigenvectors.rows();
  require(coefficients.size() == n, ErrorCode::DimensionMismatch, "coefficients do not match the eigenbasis");
  Vector e(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t col = eig.frequency_order[m];
    for (std::size_t i = 0; i < n; ++i) e[i] += coefficients[m] * eig.eigenvectors(i, col);
  }
  return e;
}

namespace {

Vector normalized(Vector y) {
  const double norm = linalg::norm2(y);
  require(norm > 0.0, ErrorCode::ZeroImage, "A phi vanishes");
  for (double& v : y) v /= norm;
  return y;
}

double residual_at(const solver::SolveTrace& trace, std::size_t iter) {
  for (const auto& r : trace.records)
    if (r.iter == iter) return r.res_l2;
  fail(ErrorCode::InvalidArgument, "trace has no iteration " + std::to_string(iter));
}

}  // namespace

Vector loading_vector(const linalg::SparseMatrix& a, std::span<const double> phi) {
  require(phi.size() == a.cols(), ErrorCode::DimensionMismatch, "mode size does not match the matrix");
  return normalized(linalg::spmv(a, phi));
}

Vector loading_vector(const linalg::DenseMatrix& a, std::span<const double> phi) {
  require(phi.size() == a.cols(), ErrorCode::DimensionMismatch, "mode size does not match the matrix");
  return normalized(linalg::matvec(a, phi));
}

double convergence_rate(const solver::SolveTrace& trace, std::size_t start, std::size_t end) {
  require(start < end, ErrorCode::InvalidArgument, "rate window needs start < end");
  const double r0 = residual_at(trace, start);
  const double r1 = residual_at(trace, end);
  require(r0 > 0.0 && r1 > 0.0, ErrorCode::NonPositiveResidual, "rate window residuals must be positive");
  return -std::log10(r1 / r0) / static_cast<double>(end - start);
}

SteadyWindow steady_window(const solver::SolveTrace& trace, std::size_t max_iterations) {
  require(!trace.records.empty(), ErrorCode::InvalidArgument, "empty trace");
  const double r0 = trace.records.front().res_l2;
  const double floor = 10.0 * DBL_EPSILON * trace.f_norm;
  SteadyWindow w;
  bool found = false;
  for (const auto& r : trace.records)
    if (r.res_l2 < 0.5 * r0) {
      w.start = r.iter;
      found = true;
      break;
    }
  if (!found) w.start = max_iterations / 5;
  w.end = w.start;
  for (const auto& r : trace.records)
    if (r.res_l2 > floor) w.end = r.iter;
  if (w.end <= w.start) w.end = trace.iterations();
  return w;
}

double steady_rate(const solver::SolveTrace& trace, std::size_t max_iterations) {
  if (trace.status == solver::SolveStatus::Diverged) return -std::numeric_limits<double>::infinity();
  const auto w = steady_window(trace, max_iterations);
  if (w.end <= w.start) return 0.0;
  return convergence_rate(trace, w.start, w.end);
}

ModeTransferMatrix mode_transfer(const solver::Corrector& corrector,
                                 std::span<const discretize::LinearSystem> systems, std::size_t n_modes,
                                 std::vector<std::uint64_t> seeds) {
  require(!systems.empty(), ErrorCode::InvalidArgument, "mode transfer needs at least one system");
  require(n_modes >= 1, ErrorCode::InvalidArgument, "mode transfer needs at least one mode");
  std::vector<std::vector<std::vector<double>>> logs(systems.size());
  parallel_for(systems.size(), [&](std::size_t s) {
    const auto& sys = systems[s];
    require(n_modes <= sys.size(), ErrorCode::InvalidArgument, "more modes requested than unknowns");
    const auto lines = discretize::sign_change_lines(sys);
    const auto eig = linalg::symmetric_eig(sys.a.to_dense(), &lines);
    const auto bound = corrector.bind(sys);
    auto& out = logs[s];
    out.assign(n_modes, std::vector<double>(n_modes, 0.0));
    for (std::size_t j = 0; j < n_modes; ++j) {
      const Vector phi = eig.mode(j);
      Vector err = bound->apply(linalg::spmv(sys.a, phi));
      for (std::size_t i = 0; i < err.size(); ++i) err[i] -= phi[i];
      const Vector c = mode_decompose(err, eig);
      for (std::size_t i = 0; i < n_modes; ++i) out[j][i] = std::log(std::max(std::abs(c[i]), kGeometricFloor));
    }
  });
  ModeTransferMatrix m;
  m.n_modes = n_modes;
  m.samples = systems.size();
  m.seeds = std::move(seeds);
  m.entries.assign(n_modes, std::vector<double>(n_modes, 0.0));
  for (std::size_t j = 0; j < n_modes; ++j)
    for (std::size_t i = 0; i < n_modes; ++i) {
      double s = 0.0;
      for (const auto& l : logs) s += l[j][i];
      m.entries[j][i] = std::exp(s / static_cast<double>(systems.size()));
    }
  return m;
}

std::string ModeTransferMatrix::csv() const {
  std::vector<std::string> header{"input_mode"};
  for (std::size_t i = 1; i <= n_modes; ++i) header.push_back("err_mode_" + std::to_string(i));
  io::CsvWriter w(header);
  for (std::size_t j = 0; j < n_modes; ++j) {
    std::vector<std::string> row{std::to_string(j + 1)};
    for (double v : entries[j]) row.push_back(io::format_double(v));
    w.add_row(std::move(row));
  }
  return "# geometric mean over " + std::to_string(samples) +
         " cases of |error coefficient| (absolute, floor 1e-16)\n" + w.str();
}

void ModeTransferMatrix::save(const std::filesystem::path& path) const { io::write_file(path, csv()); }

std::size_t RateSweepResult::best_mean_index() const {
  std::size_t best = 0;
  for (std::size_t p = 1; p < mean.size(); ++p)
    if (mean[p] > mean[best]) best = p;
  return best;
}

std::string RateSweepResult::csv() const {
  std::vector<std::string> header{"n_r", "proportion", "mean_mu", "std_mu", "converged"};
  for (std::size_t c = 0; c < mu.size(); ++c) header.push_back("case_" + std::to_string(c));
  io::CsvWriter w(header);
  for (std::size_t p = 0; p < periods.size(); ++p) {
    std::vector<std::string> row{std::to_string(periods[p]), io::format_double(1.0 / static_cast<double>(periods[p])),
                                 io::format_double(mean[p]), io::format_double(stddev[p]),
                                 std::to_string(converged[p])};
    for (const auto& c : mu) row.push_back(io::format_double(c[p]));
    w.add_row(std::move(row));
  }
  std::vector<std::string> row{"best", "", "", "", ""};
  for (auto b : best_period) row.push_back(std::to_string(b));
  w.add_row(std::move(row));
  return w.str();
}

void RateSweepResult::save(const std::filesystem::path& path) const { io::write_file(path, csv()); }

RateSweepResult rate_sweep(std::span<const discretize::LinearSystem> systems, const solver::Corrector& corrector,
                           std::span<const std::size_t> periods, const solver::SolverConfig& base) {
  require(!periods.empty(), ErrorCode::InvalidArgument, "rate sweep needs at least one period");
  RateSweepResult r;
  r.periods.assign(periods.begin(), periods.end());
  const std::size_t np = periods.size();
  r.mu.assign(systems.size(), std::vector<double>(np, 0.0));
  std::vector<char> ok(systems.size() * np, 0);
  parallel_for(systems.size() * np, [&](std::size_t job) {
    const std::size_t c = job / np;
    const std::size_t p = job % np;
    solver::SolverConfig cfg = base;
    cfg.period = periods[p];
    const auto res = solver::hints_solve(systems[c], cfg, &corrector);
    r.mu[c][p] = steady_rate(res.trace, cfg.max_iterations);
    ok[job] = res.trace.status == solver::SolveStatus::Converged;
  });
  r.mean.assign(np, 0.0);
  r.stddev.assign(np, 0.0);
  r.converged.assign(np, 0);
  for (std::size_t p = 0; p < np; ++p) {
    std::vector<double> finite;
    for (std::size_t c = 0; c < systems.size(); ++c) {
      if (ok[c * np + p]) ++r.converged[p];
      if (std::isfinite(r.mu[c][p])) finite.push_back(r.mu[c][p]);
    }
    if (finite.empty()) {
      r.mean[p] = -std::numeric_limits<double>::infinity();
      r.stddev[p] = 0.0;
      continue;
    }
    double s = 0.0;
    for (double v : finite) s += v;
    const double mean = s / static_cast<double>(finite.size());
    double q = 0.0;
    for (double v : finite) q += (v - mean) * (v - mean);
    r.mean[p] = mean;
    r.stddev[p] = std::sqrt(q / static_cast<double>(finite.size()));
  }
  for (const auto& row : r.mu)
    r.best_period.push_back(periods[static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin())]);
  return r;
}

}  // namespace hints::analysis
