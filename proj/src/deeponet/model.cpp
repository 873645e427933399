#include <cmath>
#include <sstream>

#include "hints/deeponet.hpp"
#include "hints/error.hpp"
#include "hints/random.hpp"
#include "hints/io.hpp"

namespace hints::deeponet {

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  require(values.size() == element_count(), ErrorCode::SizeMismatch, "tensor value count does not match shape");
}

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string_view to_string(MaskKind m) {
  switch (m) {
    case MaskKind::None: return "none";
    case MaskKind::Interval: return "interval";
    case MaskKind::Square: return "square";
  }
  return "none";
}

MaskKind parse_mask(std::string_view name) {
  if (name == "none") return MaskKind::None;
  if (name == "interval") return MaskKind::Interval;
  if (name == "square") return MaskKind::Square;
  fail(ErrorCode::InvalidArgument, "unknown mask kind '" + std::string(name) + "'");
}

MaskKind default_mask(const Grid& grid) {
  switch (grid.kind()) {
    case discretize::GridKind::UniformInterval: return MaskKind::Interval;
    case discretize::GridKind::UniformSquare: return MaskKind::Square;
    case discretize::GridKind::LShapedTriangulation: return MaskKind::None;
  }
  return MaskKind::None;
}

Architecture Architecture::dense_1d(std::size_t intervals) {
  Architecture a;
  a.branch_widths = {2 * (intervals + 1), 60, 60, 60};
  a.trunk_widths = {1, 60, 60, 60};
  return a;
}

Architecture Architecture::conv_2d(std::size_t intervals) {
  Architecture a;
  a.conv_channels = {2, 40, 60, 100, 180};
  a.image_side = intervals + 1;
  a.branch_widths = {180, 80, 80};
  a.trunk_widths = {2, 80, 80, 80};
  return a;
}

Architecture Architecture::for_grid(const Grid& grid) {
  if (grid.dimension() == 1) return dense_1d(grid.subdivisions());
  if (grid.kind() == discretize::GridKind::UniformSquare) return conv_2d(grid.subdivisions());
  // Triangulated nodes do not form an image; use a dense branch over all nodes.
  Architecture a;
  a.branch_widths = {2 * grid.node_count(), 80, 80, 80};
  a.trunk_widths = {2, 80, 80, 80};
  return a;
}

std::vector<std::size_t> Architecture::conv_sides() const {
  std::vector<std::size_t> sides;
  if (conv_channels.empty()) return sides;
  std::size_t s = image_side;
  sides.push_back(s);
  for (std::size_t l = 1; l < conv_channels.size(); ++l) {
    s = (s + 2 * kPadding - kKernel) / kStride + 1;
    sides.push_back(s);
  }
  return sides;
}

namespace {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::None: return "linear";
  }
  return "linear";
}

double init_bound(Activation act, std::size_t fan_in, std::size_t fan_out) {
  if (act == Activation::Relu) return std::sqrt(6.0 / static_cast<double>(fan_in));
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

DeepOnetModel::DeepOnetModel(Architecture arch, Grid grid, MaskKind mask, double alpha, double loss_eps,
                             std::uint64_t seed)
    : arch_(std::move(arch)), grid_(std::move(grid)), mask_(mask), alpha_(alpha), loss_eps_(loss_eps) {
  require(arch_.branch_widths.size() >= 2 && arch_.trunk_widths.size() >= 2, ErrorCode::InvalidArgument,
          "branch and trunk need at least one layer");
  require(arch_.branch_widths.back() == arch_.trunk_widths.back(), ErrorCode::InvalidArgument,
          "branch and trunk latent widths differ");
  require(arch_.trunk_widths.front() == static_cast<std::size_t>(grid_.dimension()), ErrorCode::InvalidArgument,
          "trunk input width must equal the domain dimension");
  if (mask_ == MaskKind::Interval)
    require(grid_.kind() == discretize::GridKind::UniformInterval, ErrorCode::InvalidArgument,
            "interval mask needs an interval grid");
  if (mask_ == MaskKind::Square)
    require(grid_.kind() == discretize::GridKind::UniformSquare, ErrorCode::InvalidArgument,
            "square mask needs a square grid");
  require(std::isfinite(alpha_) && alpha_ >= 0.0 && std::isfinite(loss_eps_) && loss_eps_ >= 0.0,
          ErrorCode::InvalidArgument, "loss parameters must be finite and nonnegative");

  std::size_t offset = 0;
  auto add_layer = [&](std::vector<Layer>& stack, std::size_t in, std::size_t out, Activation act,
                       std::size_t weights, const std::string& name, const std::string& kind) {
    Layer l;
    l.in = in;
    l.out = out;
    l.activation = act;
    l.weight_offset = offset;
    l.bias_offset = offset + weights;
    blocks_.push_back({name, kind, offset, weights + out});
    offset += weights + out;
    stack.push_back(l);
  };

  if (arch_.convolutional()) {
    const auto& ch = arch_.conv_channels;
    const auto sides = arch_.conv_sides();
    require(ch.size() >= 2 && ch.front() == 2, ErrorCode::InvalidArgument, "convolution input must have 2 channels");
    require(arch_.image_side == grid_.subdivisions() + 1 && grid_.kind() == discretize::GridKind::UniformSquare,
            ErrorCode::InvalidArgument, "convolution input must match the square grid");
    require(ch.back() == arch_.branch_widths.front(), ErrorCode::InvalidArgument,
            "dense head width must equal the last channel count");
    for (std::size_t l = 0; l + 1 < ch.size(); ++l) {
      const std::size_t k2 = Architecture::kKernel * Architecture::kKernel;
      add_layer(conv_, ch[l], ch[l + 1], Activation::Relu, ch[l + 1] * ch[l] * k2, "conv." + std::to_string(l),
                "conv-relu");
      conv_.back().in_side = sides[l];
      conv_.back().out_side = sides[l + 1];
    }
  } else {
    require(arch_.branch_widths.front() == 2 * grid_.node_count(), ErrorCode::InvalidArgument,
            "dense branch input must be 2 x grid nodes");
  }
  const auto& bw = arch_.branch_widths;
  for (std::size_t l = 0; l + 1 < bw.size(); ++l) {
    const bool last = l + 2 == bw.size();
    add_layer(branch_, bw[l], bw[l + 1], last ? Activation::None : Activation::Relu, bw[l] * bw[l + 1],
              "branch." + std::to_string(l), last ? "dense-linear" : "dense-relu");
  }
  const auto& tw = arch_.trunk_widths;
  for (std::size_t l = 0; l + 1 < tw.size(); ++l)
    add_layer(trunk_, tw[l], tw[l + 1], Activation::Tanh, tw[l] * tw[l + 1], "trunk." + std::to_string(l),
              "dense-tanh");
  output_bias_offset_ = offset;
  blocks_.push_back({"output.bias", "output-bias", offset, 1});
  ++offset;

  params_.assign(offset, 0.0);
  std::uint64_t stream = 0;
  auto init = [&](const Layer& l, std::size_t fan_in, std::size_t fan_out) {
    RandomStream rng(seed, stream++);
    const double bound = init_bound(l.activation, fan_in, fan_out);
    for (std::size_t i = l.weight_offset; i < l.bias_offset; ++i) params_[i] = rng.uniform(-bound, bound);
  };
  const std::size_t k2 = Architecture::kKernel * Architecture::kKernel;
  for (const auto& l : conv_) init(l, l.in * k2, l.out * k2);
  for (const auto& l : branch_) init(l, l.in, l.out);
  for (const auto& l : trunk_) init(l, l.in, l.out);
}

double DeepOnetModel::mask(const Point& p) const {
  switch (mask_) {
    case MaskKind::Interval: return p.x * (p.x - 1.0);
    case MaskKind::Square: return p.x * p.y * (p.x - 1.0) * (p.y - 1.0);
    case MaskKind::None: return 1.0;
  }
  return 1.0;
}

std::string DeepOnetModel::metadata() const {
  std::ostringstream os;
  os << "architecture=" << (arch_.convolutional() ? "conv" : "dense") << '\n';
  os << "grid=" << grid_.describe() << '\n';
  os << "mask=" << to_string(mask_) << '\n';
  os << "alpha=" << io::format_double(alpha_) << '\n';
  os << "loss_eps=" << io::format_double(loss_eps_) << '\n';
  if (arch_.convolutional()) {
    os << "conv_channels=" << join(arch_.conv_channels) << '\n';
    os << "conv_kernel=" << Architecture::kKernel << '\n';
    os << "conv_stride=" << Architecture::kStride << '\n';
    os << "conv_padding=" << Architecture::kPadding << '\n';
    os << "conv_sides=" << join(arch_.conv_sides()) << '\n';
    os << "conv_pool=global-average\n";
    os << "conv_layout=channel,row(y),column(x); input channels k,f/|f|\n";
  }
  os << "branch_widths=" << join(arch_.branch_widths) << '\n';
  os << "trunk_widths=" << join(arch_.trunk_widths) << '\n';
  std::string acts;
  for (const auto& l : branch_) acts += std::string(acts.empty() ? "" : ",") + activation_name(l.activation);
  os << "branch_activations=" << acts << '\n';
  acts.clear();
  for (const auto& l : trunk_) acts += std::string(acts.empty() ? "" : ",") + activation_name(l.activation);
  os << "trunk_activations=" << acts << '\n';
  os << "parameter_order=weights(out,in[,ky,kx]) then bias, per block\n";
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    os << "block." << i << '=' << blocks_[i].name << ' ' << blocks_[i].kind << ' ' << blocks_[i].offset << ' '
       << blocks_[i].size << '\n';
  os << "parameter_count=" << params_.size() << '\n';
  return os.str();
}

}  // namespace hints::deeponet
