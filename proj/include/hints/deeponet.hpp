#pragma once

#include <cstdint>
#include <filesystem>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "hints/discretize.hpp"
#include "hints/linalg.hpp"

namespace hints::deeponet {

using discretize::FieldSample;
using discretize::Grid;
using discretize::Point;
using linalg::Vector;

/// Shaped block of doubles, row-major.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> v);
  std::size_t element_count() const;
};

/// 64-byte aligned storage so vectorized kernels see the same alignment on every run
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

enum class Activation { None, Relu, Tanh };
/// Output multiplier enforcing homogeneous Dirichlet data:
/// x(x-1) on the interval, xy(x-1)(y-1) on the square, 1 otherwise.
enum class MaskKind { None, Interval, Square };

std::string_view to_string(MaskKind m);
MaskKind parse_mask(std::string_view name);
/// Mask matching a training grid (none for the L-shaped domain).
MaskKind default_mask(const Grid& grid);

struct Architecture {
  /// Convolution channels, input channels first; empty for a dense branch.
  std::vector<std::size_t> conv_channels;
  /// Square image side of the convolution input.
  std::size_t image_side = 0;
  /// Dense branch widths (after the convolution stack when present).
  std::vector<std::size_t> branch_widths;
  std::vector<std::size_t> trunk_widths;

  static constexpr std::size_t kKernel = 3;
  static constexpr std::size_t kStride = 2;
  static constexpr std::size_t kPadding = 1;

  /// Branch [2(n_D+1), 60, 60, 60], trunk [1, 60, 60, 60].
  static Architecture dense_1d(std::size_t intervals);
  /// Convolution [2, 40, 60, 100, 180] (3x3, stride 2, padding 1, global
  /// average over the final feature map), dense head [180, 80, 80], trunk [2, 80, 80, 80].
  static Architecture conv_2d(std::size_t intervals);
  static Architecture for_grid(const Grid& grid);

  bool convolutional() const { return !conv_channels.empty(); }
  std::size_t latent_width() const { return trunk_widths.back(); }
  /// Spatial side after each convolution, input side first.
  std::vector<std::size_t> conv_sides() const;
  bool operator==(const Architecture&) const = default;
};

/// Contiguous slice of the flat parameter vector.
struct ParameterBlock {
  std::string name;
  std::string kind;  // dense-relu | dense-tanh | dense-linear | conv-relu | conv-linear | output-bias
  std::size_t offset = 0;
  std::size_t size = 0;
};

class DeepOnetModel {
 public:
  DeepOnetModel(Architecture arch, Grid grid, MaskKind mask, double alpha, double loss_eps, std::uint64_t seed);

  const Architecture& architecture() const noexcept { return arch_; }
  const Grid& grid() const noexcept { return grid_; }
  MaskKind mask_kind() const noexcept { return mask_; }
  double alpha() const noexcept { return alpha_; }
  double loss_eps() const noexcept { return loss_eps_; }
  void set_loss(double alpha, double eps) {
    alpha_ = alpha;
    loss_eps_ = eps;
  }

  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  const std::vector<ParameterBlock>& blocks() const noexcept { return blocks_; }

  double mask(const Point& p) const;

  /// Header text describing layers, mask, loss, grid and spatial bookkeeping.
  std::string metadata() const;

  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::None;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
    // convolution only
    std::size_t in_side = 0;
    std::size_t out_side = 0;
  };
  const std::vector<Layer>& conv_layers() const noexcept { return conv_; }
  const std::vector<Layer>& branch_layers() const noexcept { return branch_; }
  const std::vector<Layer>& trunk_layers() const noexcept { return trunk_; }
  std::size_t output_bias_offset() const noexcept { return output_bias_offset_; }

 private:
  Architecture arch_;
  Grid grid_;
  MaskKind mask_;
  double alpha_;
  double loss_eps_;
  std::vector<Layer> conv_;
  std::vector<Layer> branch_;
  std::vector<Layer> trunk_;
  std::size_t output_bias_offset_ = 0;
  std::vector<double, AlignedAllocator<double>> params_;
  std::vector<ParameterBlock> blocks_;
};

/// Trunk outputs and mask values at a fixed set of query points.
struct TrunkFeatures {
  std::vector<double> features;  // points x latent, row-major
  std::vector<double> mask;
  std::size_t points = 0;
  std::size_t latent = 0;
};

TrunkFeatures evaluate_trunk(const DeepOnetModel& model, std::span<const Point> query);

/// u(query) for coefficient k and forcing f sampled on the model grid.
/// f is scaled to unit 2-norm before the branch and the norm multiplies the
/// output; f == 0 yields exactly 0.
Vector forward(const DeepOnetModel& model, const FieldSample& k, const FieldSample& f, std::span<const Point> query);
Vector forward(const DeepOnetModel& model, std::span<const double> k, std::span<const double> f,
               const TrunkFeatures& trunk);

/// One (k, f, u) triple sampled on every node of the model grid.
struct TrainingSample {
  Vector k;
  Vector f;
  Vector u;
};

/// Branch inputs of a batch: [B, 2(n+1)] for dense branches, [B, 2, side, side] otherwise.
Tensor encode_branch_inputs(const DeepOnetModel& model, std::span<const TrainingSample> batch);

/// Mean over samples and grid nodes of (u_hat - u)^2 / (eps + |u|^alpha).
double loss(const DeepOnetModel& model, std::span<const TrainingSample> batch, double alpha, double eps);

/// Loss and its exact gradient with respect to every parameter.
double backward(const DeepOnetModel& model, std::span<const TrainingSample> batch, double alpha, double eps,
                std::vector<double>& gradient);

struct TrainConfig {
  std::size_t epochs = 10000;
  std::size_t batch_size = 500;
  double learning_rate = 1e-3;
  double decay_factor = 0.5;
  std::size_t decay_interval = 5000;
  double alpha = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  /// Trailing fraction of the dataset held out for the test loss.
  double test_fraction = 0.1;

  void validate() const;
  double rate_at(std::size_t epoch) const;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
};

struct TrainResult {
  DeepOnetModel model;
  /// Entry 0 is the untrained model; entry e follows epoch e.
  std::vector<EpochLoss> history;
};

/// Adam (0.9, 0.999, 1e-8), seeded shuffled mini-batches, step decay.
TrainResult train(DeepOnetModel model, std::span<const TrainingSample> data, const TrainConfig& cfg);

inline constexpr char kModelMagic[8] = {'H', 'N', 'T', 'S', 'M', 'D', '1', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

void save_model(const DeepOnetModel& model, const std::filesystem::path& path);
DeepOnetModel load_model(const std::filesystem::path& path);

}  // namespace hints::deeponet
