#include <numeric>

#include "hints/error.hpp"
#include "network.hpp"

namespace hints::deeponet {

TrunkFeatures evaluate_trunk(const DeepOnetModel& model, std::span<const Point> query) {
  const auto cache = detail::trunk_forward(model, query);
  TrunkFeatures t;
  t.points = query.size();
  t.latent = model.architecture().latent_width();
  const auto& out = cache.output();
  t.features.assign(out.data(), out.data() + out.size());
  t.mask = cache.mask;
  return t;
}

Vector forward(const DeepOnetModel& model, std::span<const double> k, std::span<const double> f,
               const TrunkFeatures& trunk) {
  const std::size_t nodes = model.grid().node_count();
  require(k.size() == nodes && f.size() == nodes, ErrorCode::GridMismatch, "k and f must live on the model grid");
  require(trunk.latent == model.architecture().latent_width(), ErrorCode::SizeMismatch,
          "trunk features do not belong to this model");
  Vector out(trunk.points, 0.0);
  std::vector<double> input(2 * nodes);
  const double s = detail::encode_input(k, f, input);
  if (s == 0.0) return out;
  const detail::Mat bv = detail::branch_forward(model, input.data(), 1, nullptr);
  const double bias = model.parameters()[model.output_bias_offset()];
  for (std::size_t p = 0; p < trunk.points; ++p) {
    const double* t = trunk.features.data() + p * trunk.latent;
    double inner = 0.0;
    for (std::size_t l = 0; l < trunk.latent; ++l) inner += bv(0, static_cast<Eigen::Index>(l)) * t[l];
    out[p] = s * trunk.mask[p] * (inner + bias);
  }
  return out;
}

Vector forward(const DeepOnetModel& model, const FieldSample& k, const FieldSample& f, std::span<const Point> query) {
  require(k.grid == model.grid() && f.grid == model.grid(), ErrorCode::GridMismatch,
          "k and f must be sampled on the model grid " + model.grid().describe());
  return forward(model, k.values, f.values, evaluate_trunk(model, query));
}

Tensor encode_branch_inputs(const DeepOnetModel& model, std::span<const TrainingSample> batch) {
  const auto e = detail::encode(model, batch, 0.0, 1.0, false);
  const auto& arch = model.architecture();
  if (arch.convolutional()) return Tensor({e.count, 2, arch.image_side, arch.image_side}, e.inputs);
  return Tensor({e.count, e.input_width}, e.inputs);
}

namespace {

double run(const DeepOnetModel& model, std::span<const TrainingSample> batch, double alpha, double eps,
           std::vector<double>* grad) {
  require(!batch.empty(), ErrorCode::InvalidArgument, "loss needs a nonempty batch");
  const auto data = detail::encode(model, batch, alpha, eps, true);
  const auto trunk = detail::trunk_forward(model, model.grid().nodes());
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return detail::evaluate(model, data, idx, trunk, grad);
}

}  // namespace

double loss(const DeepOnetModel& model, std::span<const TrainingSample> batch, double alpha, double eps) {
  return run(model, batch, alpha, eps, nullptr);
}

double backward(const DeepOnetModel& model, std::span<const TrainingSample> batch, double alpha, double eps,
                std::vector<double>& gradient) {
  return run(model, batch, alpha, eps, &gradient);
}

}  // namespace hints::deeponet
