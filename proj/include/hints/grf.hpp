#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hints/discretize.hpp"
#include "hints/linalg.hpp"

namespace hints::grf {

/// Gaussian random field with squared-exponential covariance.
struct GrfConfig {
  double mean = 0.0;
  double sigma = 1.0;
  double length_scale = 0.1;
  /// Fields whose minimum over nodes is not above k_min are redrawn.
  std::optional<double> k_min;
  std::uint64_t seed = 0;

  void validate() const;
};

/// sigma^2 exp(-|x_i - x_j|^2 / (2 l^2)) over all grid nodes.
linalg::DenseMatrix covariance_matrix(const discretize::Grid& grid, const GrfConfig& cfg);

/// Cholesky-factored sampler. Sample `index` is a pure function of
/// (cfg.seed, index), so ranges of indices can be drawn independently.
class GaussianRandomField {
 public:
  static constexpr double kJitter = 1e-10;
  static constexpr int kRejectionBudget = 1000;

  GaussianRandomField(discretize::Grid grid, GrfConfig cfg);

  discretize::FieldSample draw(std::uint64_t index) const;
  std::vector<discretize::FieldSample> draw_range(std::uint64_t first, std::size_t count) const;

  const discretize::Grid& grid() const noexcept { return grid_; }
  const GrfConfig& config() const noexcept { return cfg_; }
  /// Diagonal jitter that made the covariance factorizable.
  double jitter() const noexcept { return jitter_; }

 private:
  discretize::Grid grid_;
  GrfConfig cfg_;
  linalg::DenseMatrix factor_;
  double jitter_ = kJitter;
};

std::vector<discretize::FieldSample> sample(const discretize::Grid& grid, const GrfConfig& cfg, std::size_t count);

}  // namespace hints::grf
