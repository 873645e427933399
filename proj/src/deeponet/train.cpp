#include <algorithm>
#include <cmath>
#include <numeric>

#include "hints/error.hpp"
#include "hints/random.hpp"
#include "network.hpp"

namespace hints::deeponet {

void TrainConfig::validate() const {
  require(batch_size > 0, ErrorCode::InvalidArgument, "batch size must be positive");
  require(std::isfinite(learning_rate) && learning_rate >= 0.0, ErrorCode::InvalidArgument,
          "learning rate must be finite and nonnegative");
  require(decay_factor > 0.0 && decay_factor <= 1.0, ErrorCode::InvalidArgument, "decay factor must be in (0, 1]");
  require(decay_interval > 0, ErrorCode::InvalidArgument, "decay interval must be positive");
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorCode::InvalidArgument, "alpha must be nonnegative");
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be nonnegative");
  require(alpha == 0.0 || eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive when alpha != 0");
  require(test_fraction >= 0.0 && test_fraction < 1.0, ErrorCode::InvalidArgument,
          "test fraction must be in [0, 1)");
}

double TrainConfig::rate_at(std::size_t epoch) const {
  const std::size_t e = epoch == 0 ? 0 : epoch - 1;
  return learning_rate * std::pow(decay_factor, static_cast<double>(e / decay_interval));
}

TrainResult train(DeepOnetModel model, std::span<const TrainingSample> data, const TrainConfig& cfg) {
  cfg.validate();
  require(data.size() >= cfg.batch_size, ErrorCode::InvalidArgument, "dataset is smaller than one batch");
  model.set_loss(cfg.alpha, cfg.eps);

  std::size_t test_count = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(data.size())));
  test_count = std::min(test_count, data.size() - 1);
  const std::size_t train_count = data.size() - test_count;
  const auto enc = detail::encode(model, data, cfg.alpha, cfg.eps, true);

  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> test_idx(test_count);
  std::iota(test_idx.begin(), test_idx.end(), train_count);
  const auto nodes = model.grid().nodes();

  auto test_loss = [&]() {
    if (test_idx.empty()) return std::nan("");
    const auto trunk = detail::trunk_forward(model, nodes);
    return detail::evaluate(model, enc, test_idx, trunk, nullptr);
  };

  TrainResult result{model, {}};
  {
    const auto trunk = detail::trunk_forward(model, nodes);
    result.history.push_back({0, 0.0, detail::evaluate(model, enc, order, trunk, nullptr), test_loss()});
  }

  const std::size_t n = model.parameter_count();
  std::vector<double> m(n, 0.0), v(n, 0.0), grad;
  constexpr double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
  double b1t = 1.0, b2t = 1.0;
  RandomStream rng(cfg.seed, 0x5348554646ULL);
  const std::size_t batch = std::min(cfg.batch_size, train_count);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = cfg.rate_at(epoch);
    rng.shuffle(std::span<std::size_t>(order));
    double weighted = 0.0;
    for (std::size_t first = 0; first < train_count; first += batch) {
      const std::size_t count = std::min(batch, train_count - first);
      std::span<const std::size_t> idx(order.data() + first, count);
      const auto trunk = detail::trunk_forward(model, nodes);
      const double l = detail::evaluate(model, enc, idx, trunk, &grad);
      if (!std::isfinite(l)) fail(ErrorCode::DivergedLoss, "training loss became non-finite at epoch " +
                                                               std::to_string(epoch));
      weighted += l * static_cast<double>(count);
      b1t *= b1;
      b2t *= b2;
      auto p = model.parameters();
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mh = m[i] / (1.0 - b1t);
        const double vh = v[i] / (1.0 - b2t);
        p[i] -= lr * mh / (std::sqrt(vh) + adam_eps);
      }
    }
    const double tl = test_loss();
    if (!test_idx.empty() && !std::isfinite(tl))
      fail(ErrorCode::DivergedLoss, "test loss became non-finite at epoch " + std::to_string(epoch));
    result.history.push_back({epoch, lr, weighted / static_cast<double>(train_count), tl});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace hints::deeponet
