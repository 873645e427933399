#include "network.hpp"

#include <algorithm>
#include <cmath>

#include "hints/error.hpp"
#include "hints/parallel.hpp"

namespace hints::deeponet::detail {

namespace {

constexpr std::size_t kChunk = 32;

void activate(Mat& z, Activation act) {
  if (act == Activation::Relu)
    z = z.cwiseMax(0.0);
  else if (act == Activation::Tanh)
    z = z.array().tanh().matrix();
}

// Turns dL/dA into dL/dZ in place, given the activated output A.
void activation_backward(Mat& d, const Mat& a, Activation act) {
  if (act == Activation::Relu)
    d = (a.array() > 0.0).select(d.array(), 0.0).matrix();
  else if (act == Activation::Tanh)
    d = (d.array() * (1.0 - a.array().square())).matrix();
}

Mat dense_forward(const DeepOnetModel::Layer& l, const double* params, const Mat& x) {
  ConstMatMap w(params + l.weight_offset, l.out, l.in);
  Eigen::Map<const Eigen::RowVectorXd> b(params + l.bias_offset, l.out);
  Mat z = x * w.transpose();
  z.rowwise() += b;
  activate(z, l.activation);
  return z;
}

// d enters as dL/dA of this layer's output and is consumed.
Mat dense_backward(const DeepOnetModel::Layer& l, const double* params, const Mat& x, const Mat& a, Mat& d,
                   double* grad, bool need_input_grad) {
  activation_backward(d, a, l.activation);
  MatMap gw(grad + l.weight_offset, l.out, l.in);
  Eigen::Map<Eigen::RowVectorXd> gb(grad + l.bias_offset, l.out);
  // Products land in owned (aligned) storage first; the gradient buffer's alignment varies.
  const Mat dw = d.transpose() * x;
  const Eigen::RowVectorXd db = d.colwise().sum();
  gw += dw;
  gb += db;
  if (!need_input_grad) return {};
  ConstMatMap w(params + l.weight_offset, l.out, l.in);
  return d * w;
}

constexpr std::size_t kK = Architecture::kKernel;
constexpr std::size_t kS = Architecture::kStride;
constexpr std::ptrdiff_t kP = static_cast<std::ptrdiff_t>(Architecture::kPadding);

Mat im2col(const Mat& in, std::size_t batch, std::size_t side_in, std::size_t side_out) {
  const std::size_t channels = static_cast<std::size_t>(in.rows());
  const std::size_t hw_in = side_in * side_in;
  const std::size_t hw_out = side_out * side_out;
  Mat col = Mat::Zero(static_cast<Eigen::Index>(channels * kK * kK), static_cast<Eigen::Index>(batch * hw_out));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t ky = 0; ky < kK; ++ky)
      for (std::size_t kx = 0; kx < kK; ++kx) {
        const auto row = static_cast<Eigen::Index>((c * kK + ky) * kK + kx);
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t oy = 0; oy < side_out; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * kS + ky) - kP;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(side_in)) continue;
            for (std::size_t ox = 0; ox < side_out; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * kS + kx) - kP;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(side_in)) continue;
              col(row, static_cast<Eigen::Index>(b * hw_out + oy * side_out + ox)) =
                  in(static_cast<Eigen::Index>(c),
                     static_cast<Eigen::Index>(b * hw_in + static_cast<std::size_t>(iy) * side_in +
                                               static_cast<std::size_t>(ix)));
            }
          }
      }
  return col;
}

Mat col2im(const Mat& col, std::size_t channels, std::size_t batch, std::size_t side_in, std::size_t side_out) {
  const std::size_t hw_in = side_in * side_in;
  const std::size_t hw_out = side_out * side_out;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(batch * hw_in));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t ky = 0; ky < kK; ++ky)
      for (std::size_t kx = 0; kx < kK; ++kx) {
        const auto row = static_cast<Eigen::Index>((c * kK + ky) * kK + kx);
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t oy = 0; oy < side_out; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * kS + ky) - kP;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(side_in)) continue;
            for (std::size_t ox = 0; ox < side_out; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * kS + kx) - kP;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(side_in)) continue;
              out(static_cast<Eigen::Index>(c),
                  static_cast<Eigen::Index>(b * hw_in + static_cast<std::size_t>(iy) * side_in +
                                            static_cast<std::size_t>(ix))) +=
                  col(row, static_cast<Eigen::Index>(b * hw_out + oy * side_out + ox));
            }
          }
      }
  return out;
}

}  // namespace

double encode_input(std::span<const double> k, std::span<const double> f, std::span<double> out) {
  require(k.size() == f.size() && out.size() == 2 * k.size(), ErrorCode::GridMismatch,
          "branch input sizes do not match the model grid");
  double sq = 0.0;
  for (double v : f) sq += v * v;
  const double s = std::sqrt(sq);
  std::copy(k.begin(), k.end(), out.begin());
  for (std::size_t i = 0; i < f.size(); ++i) out[k.size() + i] = s > 0.0 ? f[i] / s : 0.0;
  return s;
}

EncodedSet encode(const DeepOnetModel& model, std::span<const TrainingSample> samples, double alpha, double eps,
                  bool with_targets) {
  const std::size_t nodes = model.grid().node_count();
  EncodedSet e;
  e.count = samples.size();
  e.input_width = 2 * nodes;
  e.points = nodes;
  e.inputs.resize(e.count * e.input_width);
  e.scales.resize(e.count);
  if (with_targets) {
    e.targets.resize(e.count * nodes);
    e.weights.resize(e.count * nodes);
  }
  for (std::size_t s = 0; s < e.count; ++s) {
    const auto& smp = samples[s];
    require(smp.k.size() == nodes && smp.f.size() == nodes, ErrorCode::GridMismatch,
            "training sample does not match the model grid");
    e.scales[s] = encode_input(smp.k, smp.f, std::span<double>(e.inputs).subspan(s * e.input_width, e.input_width));
    if (!with_targets) continue;
    require(smp.u.size() == nodes, ErrorCode::GridMismatch, "training target does not match the model grid");
    for (std::size_t p = 0; p < nodes; ++p) {
      const double u = smp.u[p];
      e.targets[s * nodes + p] = u;
      e.weights[s * nodes + p] = 1.0 / (eps + std::pow(std::abs(u), alpha));
    }
  }
  return e;
}

TrunkCache trunk_forward(const DeepOnetModel& model, std::span<const Point> points) {
  TrunkCache c;
  const auto dim = static_cast<Eigen::Index>(model.architecture().trunk_widths.front());
  Mat x(static_cast<Eigen::Index>(points.size()), dim);
  c.mask.resize(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    x(static_cast<Eigen::Index>(p), 0) = points[p].x;
    if (dim > 1) x(static_cast<Eigen::Index>(p), 1) = points[p].y;
    c.mask[p] = model.mask(points[p]);
  }
  c.acts.push_back(std::move(x));
  const double* params = model.parameters().data();
  for (const auto& l : model.trunk_layers()) c.acts.push_back(dense_forward(l, params, c.acts.back()));
  return c;
}

void trunk_backward(const DeepOnetModel& model, const TrunkCache& cache, Mat d_out, std::span<double> grad) {
  const auto& layers = model.trunk_layers();
  const double* params = model.parameters().data();
  for (std::size_t l = layers.size(); l-- > 0;)
    d_out = dense_backward(layers[l], params, cache.acts[l], cache.acts[l + 1], d_out, grad.data(), l > 0);
}

Mat branch_forward(const DeepOnetModel& model, const double* inputs, std::size_t count, BranchCache* cache) {
  const double* params = model.parameters().data();
  const auto& arch = model.architecture();
  const std::size_t width = 2 * model.grid().node_count();
  Mat x;
  if (arch.convolutional()) {
    const std::size_t hw = arch.image_side * arch.image_side;
    Mat a(2, static_cast<Eigen::Index>(count * hw));
    for (std::size_t b = 0; b < count; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t p = 0; p < hw; ++p)
          a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b * hw + p)) = inputs[b * width + c * hw + p];
    for (const auto& l : model.conv_layers()) {
      Mat col = im2col(a, count, l.in_side, l.out_side);
      ConstMatMap w(params + l.weight_offset, l.out, l.in * kK * kK);
      Eigen::Map<const Eigen::VectorXd> bias(params + l.bias_offset, l.out);
      Mat z = w * col;
      z.colwise() += bias;
      activate(z, l.activation);
      if (cache) {
        cache->conv_acts.push_back(std::move(a));
        cache->conv_cols.push_back(std::move(col));
      }
      a = std::move(z);
    }
    const std::size_t hw_last = model.conv_layers().back().out_side * model.conv_layers().back().out_side;
    x.resize(static_cast<Eigen::Index>(count), a.rows());
    for (std::size_t b = 0; b < count; ++b)
      x.row(static_cast<Eigen::Index>(b)) =
          a.middleCols(static_cast<Eigen::Index>(b * hw_last), static_cast<Eigen::Index>(hw_last))
              .rowwise()
              .mean()
              .transpose();
    if (cache) cache->conv_acts.push_back(std::move(a));
  } else {
    x = ConstMatMap(inputs, static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(width));
  }
  for (const auto& l : model.branch_layers()) {
    Mat y = dense_forward(l, params, x);
    if (cache) cache->dense_acts.push_back(std::move(x));
    x = std::move(y);
  }
  if (cache) cache->dense_acts.push_back(x);
  return x;
}

void branch_backward(const DeepOnetModel& model, const BranchCache& cache, Mat d_out, std::span<double> grad) {
  const double* params = model.parameters().data();
  const auto& dense = model.branch_layers();
  const bool conv = model.architecture().convolutional();
  for (std::size_t l = dense.size(); l-- > 0;)
    d_out = dense_backward(dense[l], params, cache.dense_acts[l], cache.dense_acts[l + 1], d_out, grad.data(),
                           l > 0 || conv);
  if (!conv) return;
  const auto& layers = model.conv_layers();
  const std::size_t count = static_cast<std::size_t>(d_out.rows());
  const std::size_t side_last = layers.back().out_side;
  const std::size_t hw_last = side_last * side_last;
  // Undo the global average.
  Mat d(static_cast<Eigen::Index>(layers.back().out), static_cast<Eigen::Index>(count * hw_last));
  for (std::size_t b = 0; b < count; ++b)
    for (std::size_t p = 0; p < hw_last; ++p)
      d.col(static_cast<Eigen::Index>(b * hw_last + p)) =
          d_out.row(static_cast<Eigen::Index>(b)).transpose() / static_cast<double>(hw_last);
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    activation_backward(d, cache.conv_acts[l + 1], layer.activation);
    MatMap gw(grad.data() + layer.weight_offset, layer.out, layer.in * kK * kK);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + layer.bias_offset, layer.out);
    const Mat dw = d * cache.conv_cols[l].transpose();
    const Eigen::VectorXd db = d.rowwise().sum();
    gw += dw;
    gb += db;
    if (l == 0) break;
    ConstMatMap w(params + layer.weight_offset, layer.out, layer.in * kK * kK);
    Mat dcol = w.transpose() * d;
    d = col2im(dcol, layer.in, count, layer.in_side, layer.out_side);
  }
}

double evaluate(const DeepOnetModel& model, const EncodedSet& data, std::span<const std::size_t> indices,
                const TrunkCache& trunk, std::vector<double>* grad) {
  require(!indices.empty(), ErrorCode::InvalidArgument, "loss needs a nonempty batch");
  require(!data.targets.empty(), ErrorCode::InvalidArgument, "loss needs targets");
  const std::size_t total = indices.size();
  const std::size_t points = data.points;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  const double norm = 1.0 / static_cast<double>(total * points);
  const Mat& t = trunk.output();
  const double bias = model.parameters()[model.output_bias_offset()];

  std::vector<double> chunk_loss(chunks, 0.0);
  std::vector<std::vector<double>> chunk_grad(grad ? chunks : 0);
  std::vector<Mat> chunk_dt(grad ? chunks : 0);

  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t first = c * kChunk;
    const std::size_t count = std::min(kChunk, total - first);
    Mat x(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(data.input_width));
    for (std::size_t b = 0; b < count; ++b)
      x.row(static_cast<Eigen::Index>(b)) = Eigen::Map<const Eigen::RowVectorXd>(
          data.inputs.data() + indices[first + b] * data.input_width, static_cast<Eigen::Index>(data.input_width));
    BranchCache cache;
    Mat bv = branch_forward(model, x.data(), count, grad ? &cache : nullptr);
    Mat inner = bv * t.transpose();
    Mat g(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(points));
    double acc = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
      const std::size_t s = indices[first + b];
      const double scale = data.scales[s];
      for (std::size_t p = 0; p < points; ++p) {
        const double factor = scale * trunk.mask[p];
        const double y = factor * (inner(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(p)) + bias);
        const double diff = y - data.targets[s * points + p];
        const double w = data.weights[s * points + p];
        acc += w * diff * diff;
        g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(p)) = 2.0 * w * diff * norm * factor;
      }
    }
    chunk_loss[c] = acc;
    if (!grad) return;
    auto& cg = chunk_grad[c];
    cg.assign(model.parameter_count(), 0.0);
    cg[model.output_bias_offset()] = g.sum();
    chunk_dt[c] = g.transpose() * bv;
    branch_backward(model, cache, g * t, cg);
  });

  double sum = 0.0;
  for (double l : chunk_loss) sum += l;
  if (grad) {
    grad->assign(model.parameter_count(), 0.0);
    Mat dt = Mat::Zero(t.rows(), t.cols());
    for (std::size_t c = 0; c < chunks; ++c) {
      for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += chunk_grad[c][i];
      dt += chunk_dt[c];
    }
    trunk_backward(model, trunk, std::move(dt), *grad);
  }
  return sum * norm;
}

}  // namespace hints::deeponet::detail
