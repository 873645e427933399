#include "hints/error.hpp"
#include "hints/solver.hpp"

namespace hints::solver {

namespace {

using discretize::FieldSample;
using discretize::GridKind;

class BoundDeepOnet final : public BoundCorrector {
 public:
  BoundDeepOnet(const deeponet::DeepOnetModel& model, const LinearSystem& system)
      : model_(model), system_(system), k_(discretize::interpolate_field(system.k, model.grid())) {
    trunk_ = deeponet::evaluate_trunk(model, system.interior_points());
  }

  Vector apply(std::span<const double> residual) const override {
    FieldSample r = discretize::revert_residual(residual, system_);
    if (!(r.grid == model_.grid())) r = discretize::interpolate_field(r, model_.grid());
    return deeponet::forward(model_, k_.values, r.values, trunk_);
  }

 private:
  const deeponet::DeepOnetModel& model_;
  const LinearSystem& system_;
  FieldSample k_;
  deeponet::TrunkFeatures trunk_;
};

class BoundExact final : public BoundCorrector {
 public:
  explicit BoundExact(const LinearSystem& system) : system_(system) {
    if (system.size() <= kDenseLimit) lu_.emplace(system.a.to_dense());
  }

  Vector apply(std::span<const double> residual) const override {
    if (lu_) return lu_->solve(residual);
    return linalg::direct_solve(system_.a, residual);
  }

 private:
  static constexpr std::size_t kDenseLimit = 1500;
  const LinearSystem& system_;
  std::optional<linalg::LuFactorization> lu_;
};

}  // namespace

std::unique_ptr<BoundCorrector> DeepOnetCorrector::bind(const LinearSystem& system) const {
  const auto& g = model_->grid();
  const bool same_domain = g.kind() == system.grid.kind() &&
                           (g.kind() != GridKind::LShapedTriangulation || g.has_notch() == system.grid.has_notch());
  require(same_domain, ErrorCode::GridIncompatible,
          "model grid " + g.describe() + " does not cover the domain of " + system.grid.describe());
  return std::make_unique<BoundDeepOnet>(*model_, system);
}

std::unique_ptr<BoundCorrector> ExactCorrector::bind(const LinearSystem& system) const {
  return std::make_unique<BoundExact>(system);
}

}  // namespace hints::solver
