#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "hints/deeponet.hpp"
#include "hints/error.hpp"
#include "hints/io.hpp"

using namespace hints;
using namespace hints::deeponet;
using discretize::FieldSample;
using discretize::Grid;
using linalg::Vector;

namespace {

std::vector<TrainingSample> random_samples(const Grid& g, std::size_t count, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<TrainingSample> out(count);
  for (auto& s : out) {
    s.k = testing::random_vector(rng, g.node_count(), 0.5, 1.5);
    s.f = testing::random_vector(rng, g.node_count());
    s.u = testing::random_vector(rng, g.node_count(), -0.05, 0.05);
  }
  return out;
}

DeepOnetModel small_dense(const Grid& g, std::uint64_t seed) {
  Architecture a;
  a.branch_widths = {2 * g.node_count(), 8, 8, 6};
  a.trunk_widths = {static_cast<std::size_t>(g.dimension()), 7, 6};
  return DeepOnetModel(a, g, default_mask(g), 0.0, 0.0, seed);
}

DeepOnetModel small_conv(std::uint64_t seed) {
  const auto g = Grid::square(6);
  Architecture a;
  a.conv_channels = {2, 3, 4};
  a.image_side = 7;
  a.branch_widths = {4, 5, 5};
  a.trunk_widths = {2, 6, 5};
  return DeepOnetModel(a, g, MaskKind::Square, 0.0, 0.0, seed);
}

// Central differences on up to `probes` parameters of every block; returns the worst
// relative disagreement (absolute when both sides are below 1e-9).
double gradient_check(DeepOnetModel& model, const std::vector<TrainingSample>& batch, double alpha, double eps,
                      std::size_t probes, std::uint64_t seed) {
  std::vector<double> grad;
  backward(model, batch, alpha, eps, grad);
  RandomStream rng(seed, 1);
  double worst = 0.0;
  for (const auto& b : model.blocks()) {
    for (std::size_t t = 0; t < std::min(probes, b.size); ++t) {
      const std::size_t i = b.offset + static_cast<std::size_t>(rng.next_u64() % b.size);
      const double keep = model.parameters()[i];
      const double step = 1e-5;
      model.parameters()[i] = keep + step;
      const double up = loss(model, batch, alpha, eps);
      model.parameters()[i] = keep - step;
      const double down = loss(model, batch, alpha, eps);
      model.parameters()[i] = keep;
      const double fd = (up - down) / (2.0 * step);
      const double scale = std::max(std::abs(fd), std::abs(grad[i]));
      if (scale < 1e-9) continue;
      worst = std::max(worst, std::abs(fd - grad[i]) / scale);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("deeponet") {
  TEST_CASE("standard architectures") {
    const auto d = Architecture::dense_1d(30);
    CHECK(d.branch_widths == std::vector<std::size_t>{62, 60, 60, 60});
    CHECK(d.trunk_widths == std::vector<std::size_t>{1, 60, 60, 60});
    const auto c = Architecture::conv_2d(30);
    CHECK(c.conv_channels == std::vector<std::size_t>{2, 40, 60, 100, 180});
    CHECK(c.conv_sides() == std::vector<std::size_t>{31, 16, 8, 4, 2});
    const DeepOnetModel m(c, Grid::square(30), MaskKind::Square, 2.0, 1e-2, 1);
    const auto md = io::parse_metadata(m.metadata());
    CHECK(md.at("conv_sides") == "31,16,8,4,2");
    CHECK(md.at("conv_pool") == "global-average");
    CHECK(md.at("mask") == "square");
    // The global average leaves one value per channel: the dense head input is 180 wide.
    CHECK(m.branch_layers().front().in == 180);
    CHECK(m.conv_layers().back().out_side == 2);
  }

  TEST_CASE("layout validation") {
    Architecture a = Architecture::dense_1d(30);
    a.trunk_widths.back() = 50;
    CHECK_THROWS_AS(DeepOnetModel(a, Grid::interval(30), MaskKind::Interval, 0, 0, 0), Error);
    CHECK_THROWS_AS(DeepOnetModel(Architecture::dense_1d(20), Grid::interval(30), MaskKind::Interval, 0, 0, 0),
                    Error);
    CHECK_THROWS_AS(DeepOnetModel(Architecture::dense_1d(30), Grid::interval(30), MaskKind::Square, 0, 0, 0), Error);
  }

  TEST_CASE("zero forcing maps to zero exactly") {
    const auto g = Grid::interval(30);
    const DeepOnetModel m(Architecture::dense_1d(30), g, MaskKind::Interval, 0, 0, 3);
    const auto out = forward(m, FieldSample::constant(g, 1.0), FieldSample::constant(g, 0.0), g.nodes());
    for (double v : out) CHECK(v == 0.0);
  }

  TEST_CASE("boundary mask is exact") {
    RandomStream rng(4, 0);
    const auto g = Grid::interval(30);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const DeepOnetModel m(Architecture::dense_1d(30), g, MaskKind::Interval, 0, 0, seed);
      const FieldSample k(g, testing::random_vector(rng, 31, 0.5, 1.5));
      const FieldSample f(g, testing::random_vector(rng, 31));
      const std::vector<discretize::Point> ends{{0.0, 0.0}, {1.0, 0.0}};
      const auto out = forward(m, k, f, ends);
      CHECK(out[0] == 0.0);
      CHECK(out[1] == 0.0);
    }
    const auto m2 = small_conv(5);
    const auto g2 = m2.grid();
    const FieldSample k(g2, testing::random_vector(rng, g2.node_count(), 0.5, 1.5));
    const FieldSample f(g2, testing::random_vector(rng, g2.node_count()));
    const auto out = forward(m2, k, f, g2.nodes());
    for (std::size_t i = 0; i < g2.node_count(); ++i)
      if (g2.is_boundary(i)) CHECK(out[i] == 0.0);
  }

  TEST_CASE("forcing scaling equivariance") {
    RandomStream rng(6, 0);
    const auto g = Grid::interval(30);
    const DeepOnetModel m(Architecture::dense_1d(30), g, MaskKind::Interval, 0, 0, 8);
    const FieldSample k(g, testing::random_vector(rng, 31, 0.5, 1.5));
    const auto fv = testing::random_vector(rng, 31);
    Vector f10 = fv;
    for (double& v : f10) v *= 10.0;
    const auto a = forward(m, k, FieldSample(g, fv), g.nodes());
    const auto b = forward(m, k, FieldSample(g, f10), g.nodes());
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] - 10.0 * a[i]) <= 1e-14 * 10.0 * scale);
  }

  TEST_CASE("forward rejects fields on another grid") {
    const auto g = Grid::interval(30);
    const DeepOnetModel m(Architecture::dense_1d(30), g, MaskKind::Interval, 0, 0, 8);
    const auto g2 = Grid::interval(15);
    try {
      forward(m, FieldSample::constant(g2, 1.0), FieldSample::constant(g2, 1.0), g2.nodes());
      FAIL("expected GridMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GridMismatch);
    }
  }

  TEST_CASE("loss values") {
    // Two-node grid, all-zero network: predictions are 0, errors (1, 3).
    const auto g = Grid::interval(1);
    Architecture a;
    a.branch_widths = {4, 3};
    a.trunk_widths = {1, 3};
    DeepOnetModel m(a, g, MaskKind::None, 0, 0, 0);
    std::fill(m.parameters().begin(), m.parameters().end(), 0.0);
    const std::vector<TrainingSample> batch{{{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}}};
    CHECK(loss(m, batch, 0.0, 0.0) == 5.0);
    // alpha = 1: weights 1/(eps + |u|) = 1/2 and 1/4 with eps = 1.
    CHECK(loss(m, batch, 1.0, 1.0) == doctest::Approx((1.0 / 2.0 + 9.0 / 4.0) / 2.0));

    const auto g30 = Grid::interval(30);
    const DeepOnetModel model(Architecture::dense_1d(30), g30, MaskKind::Interval, 0, 0, 2);
    auto samples = random_samples(g30, 3, 9);
    for (auto& s : samples)
      s.u = forward(model, FieldSample(g30, s.k), FieldSample(g30, s.f), g30.nodes());
    // Batched and single-sample products may round differently in the last bit.
    CHECK(loss(model, samples, 0.0, 0.0) <= 1e-28);
    std::vector<double> grad;
    backward(model, samples, 0.0, 0.0, grad);
    for (double v : grad) CHECK(std::abs(v) <= 1e-12);
  }

  TEST_CASE("gradient check, dense branch") {
    const auto g = Grid::interval(8);
    auto m = small_dense(g, 11);
    const auto batch = random_samples(g, 3, 12);
    CHECK(gradient_check(m, batch, 0.0, 0.0, 50, 1) <= 1e-6);
    CHECK(gradient_check(m, batch, 1.0, 0.1, 50, 2) <= 1e-6);
  }

  TEST_CASE("gradient check, convolutional branch") {
    auto m = small_conv(13);
    const auto batch = random_samples(m.grid(), 3, 14);
    CHECK(gradient_check(m, batch, 2.0, 0.05, 50, 3) <= 1e-6);
  }

  TEST_CASE("ReLU kink has zero gradient") {
    const auto g = Grid::interval(8);
    auto m = small_dense(g, 15);
    const auto& first = m.branch_layers().front();
    for (std::size_t i = first.weight_offset; i < first.bias_offset + first.out; ++i) m.parameters()[i] = 0.0;
    const auto batch = random_samples(g, 2, 16);
    std::vector<double> grad;
    backward(m, batch, 0.0, 0.0, grad);
    for (std::size_t i = first.weight_offset; i < first.bias_offset + first.out; ++i) CHECK(grad[i] == 0.0);
  }

  TEST_CASE("branch input encoding") {
    const auto m = small_conv(1);
    const auto batch = random_samples(m.grid(), 2, 3);
    const auto t = encode_branch_inputs(m, batch);
    CHECK(t.shape == std::vector<std::size_t>{2, 2, 7, 7});
    CHECK(t.values.size() == t.element_count());
    CHECK(t.values[0] == batch[0].k[0]);
    double sq = 0.0;
    for (std::size_t i = 0; i < 49; ++i) sq += t.values[49 + i] * t.values[49 + i];
    CHECK(sq == doctest::Approx(1.0));
    CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5)), Error);
  }

  TEST_CASE("training: zero rate, determinism, progress, divergence") {
    const auto g = Grid::interval(8);
    const auto data = random_samples(g, 40, 21);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.0;
    cfg.seed = 4;
    const auto m0 = small_dense(g, 22);
    const auto frozen = train(m0, data, cfg);
    CHECK(std::equal(frozen.model.parameters().begin(), frozen.model.parameters().end(), m0.parameters().begin()));
    CHECK(frozen.history.size() == 4);

    cfg.learning_rate = 1e-2;
    cfg.epochs = 60;
    const auto r1 = train(m0, data, cfg);
    const auto r2 = train(m0, data, cfg);
    for (std::size_t e = 0; e < r1.history.size(); ++e) {
      CHECK(r1.history[e].train_loss == r2.history[e].train_loss);
      CHECK(r1.history[e].test_loss == r2.history[e].test_loss);
    }
    CHECK(r1.history.back().train_loss < 0.5 * r1.history.front().train_loss);

    cfg.learning_rate = 1e300;
    cfg.epochs = 10;
    CHECK_THROWS_AS(train(m0, data, cfg), Error);

    cfg.learning_rate = 1e-3;
    cfg.batch_size = 100;
    CHECK_THROWS_AS(train(m0, data, cfg), Error);
  }

  TEST_CASE("learning-rate schedule") {
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.decay_factor = 0.5;
    cfg.decay_interval = 5000;
    CHECK(cfg.rate_at(1) == 1e-3);
    CHECK(cfg.rate_at(5000) == 1e-3);
    CHECK(cfg.rate_at(5001) == 5e-4);
    CHECK(cfg.rate_at(10001) == 2.5e-4);
    cfg.alpha = 1.0;
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }

  TEST_CASE("checkpoint round trip") {
    const auto dir = testing::temp_dir("deeponet_io");
    for (int kind = 0; kind < 2; ++kind) {
      const auto m = kind == 0 ? DeepOnetModel(Architecture::dense_1d(30), Grid::interval(30), MaskKind::Interval, 1.0,
                                               0.01, 31)
                               : small_conv(32);
      const auto p1 = dir / ("m" + std::to_string(kind) + "a.bin");
      const auto p2 = dir / ("m" + std::to_string(kind) + "b.bin");
      save_model(m, p1);
      const auto loaded = load_model(p1);
      save_model(loaded, p2);
      CHECK(io::read_file(p1) == io::read_file(p2));
      CHECK(std::equal(m.parameters().begin(), m.parameters().end(), loaded.parameters().begin()));
      CHECK(loaded.alpha() == m.alpha());
      RandomStream rng(33, 0);
      const auto& g = m.grid();
      for (int t = 0; t < 10; ++t) {
        const FieldSample k(g, testing::random_vector(rng, g.node_count(), 0.5, 1.5));
        const FieldSample f(g, testing::random_vector(rng, g.node_count()));
        const auto a = forward(m, k, f, g.nodes());
        const auto b = forward(loaded, k, f, g.nodes());
        CHECK(testing::max_abs_diff(a, b) <= 1e-16);
      }
      // Truncation breaks the checksum.
      auto bytes = io::read_file(p1);
      io::write_file(p2, bytes.substr(0, bytes.size() - 9));
      try {
        load_model(p2);
        FAIL("expected CorruptChecksum");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptChecksum);
      }
      io::write_file(p2, io::encode_container(kModelMagic, kModelVersion + 1, m.metadata(), m.parameters()));
      try {
        load_model(p2);
        FAIL("expected FormatVersionMismatch");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FormatVersionMismatch);
      }
    }
  }
}
