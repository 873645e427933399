#include "hints/grf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hints/error.hpp"
#include "hints/random.hpp"

namespace hints::grf {

using discretize::FieldSample;
using discretize::Grid;
using linalg::DenseMatrix;

void GrfConfig::validate() const {
  require(std::isfinite(mean) && std::isfinite(sigma) && sigma >= 0.0, ErrorCode::InvalidArgument,
          "GRF sigma must be finite and >= 0");
  require(length_scale > 0.0, ErrorCode::InvalidArgument, "GRF length scale must be positive");
  if (k_min) require(*k_min < mean, ErrorCode::InvalidArgument, "GRF k_min must be below the mean");
}

DenseMatrix covariance_matrix(const Grid& grid, const GrfConfig& cfg) {
  cfg.validate();
  const std::size_t n = grid.node_count();
  require(n > 0, ErrorCode::InvalidArgument, "covariance of an empty grid");
  DenseMatrix c(n, n);
  const double var = cfg.sigma * cfg.sigma;
  const double denom = 2.0 * cfg.length_scale * cfg.length_scale;
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = var;
    for (std::size_t j = 0; j < i; ++j) {
      const double dx = grid.node(i).x - grid.node(j).x;
      const double dy = grid.node(i).y - grid.node(j).y;
      c(i, j) = c(j, i) = var * std::exp(-(dx * dx + dy * dy) / denom);
    }
  }
  return c;
}

GaussianRandomField::GaussianRandomField(Grid grid, GrfConfig cfg) : grid_(std::move(grid)), cfg_(cfg) {
  cfg_.validate();
  if (cfg_.sigma == 0.0) return;
  const DenseMatrix cov = covariance_matrix(grid_, cfg_);
  // Squared-exponential Gram matrices are numerically rank deficient on
  // fine grids; escalate the jitter by decades until the factor exists.
  const double cap = std::max(1e-6, 1e-4 * cfg_.sigma * cfg_.sigma);
  for (jitter_ = kJitter; jitter_ <= cap; jitter_ *= 10.0) {
    DenseMatrix shifted = cov;
    for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += jitter_;
    try {
      factor_ = linalg::cholesky(shifted);
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    }
  }
  fail(ErrorCode::NotPositiveDefinite, "GRF covariance not factorizable on " + grid_.describe());
}

FieldSample GaussianRandomField::draw(std::uint64_t index) const {
  const std::size_t n = grid_.node_count();
  if (cfg_.sigma == 0.0) return FieldSample::constant(grid_, cfg_.mean);
  RandomStream rng(cfg_.seed, index);
  linalg::Vector z(n);
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    for (double& v : z) v = rng.normal();
    linalg::Vector values(n, cfg_.mean);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = factor_.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
      values[i] += s;
    }
    if (!cfg_.k_min || *std::min_element(values.begin(), values.end()) > *cfg_.k_min)
      return FieldSample(grid_, std::move(values));
  }
  fail(ErrorCode::RejectionBudgetExceeded,
       "no field above k_min after " + std::to_string(kRejectionBudget) + " draws (index " + std::to_string(index) +
           ")");
}

std::vector<FieldSample> GaussianRandomField::draw_range(std::uint64_t first, std::size_t count) const {
  std::vector<FieldSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw(first + i));
  return out;
}

std::vector<FieldSample> sample(const Grid& grid, const GrfConfig& cfg, std::size_t count) {
  return GaussianRandomField(grid, cfg).draw_range(0, count);
}

}  // namespace hints::grf
