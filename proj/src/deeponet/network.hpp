#pragma once

// Batched forward/backward passes shared by inference and training.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hints/deeponet.hpp"

namespace hints::deeponet::detail {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<Mat>;
using ConstMatMap = Eigen::Map<const Mat>;

/// Samples pre-encoded for the network: branch inputs, forcing scales,
/// targets and loss weights on every grid node.
struct EncodedSet {
  std::size_t count = 0;
  std::size_t input_width = 0;
  std::size_t points = 0;
  std::vector<double> inputs;   // count x input_width
  std::vector<double> scales;   // count
  std::vector<double> targets;  // count x points
  std::vector<double> weights;  // count x points
};

/// Branch input of one sample; returns the forcing scale ||f||_2.
double encode_input(std::span<const double> k, std::span<const double> f, std::span<double> out);

EncodedSet encode(const DeepOnetModel& model, std::span<const TrainingSample> samples, double alpha, double eps,
                  bool with_targets);

struct TrunkCache {
  std::vector<Mat> acts;  // acts[0] is the coordinate input
  std::vector<double> mask;
  const Mat& output() const { return acts.back(); }
};

TrunkCache trunk_forward(const DeepOnetModel& model, std::span<const Point> points);
void trunk_backward(const DeepOnetModel& model, const TrunkCache& cache, Mat d_out, std::span<double> grad);

struct BranchCache {
  std::vector<Mat> conv_acts;  // C x (B * side^2); entry 0 is the input image
  std::vector<Mat> conv_cols;  // im2col of each convolution input
  std::vector<Mat> dense_acts; // B x width; entry 0 is the dense input
};

/// Branch output (B x latent) of `count` encoded rows.
Mat branch_forward(const DeepOnetModel& model, const double* inputs, std::size_t count, BranchCache* cache);
void branch_backward(const DeepOnetModel& model, const BranchCache& cache, Mat d_out, std::span<double> grad);

/// Weighted loss over the selected samples; accumulates its exact gradient
/// into `grad` when non-null. Work is split into fixed chunks and reduced
/// in chunk order, so the result does not depend on the thread count.
double evaluate(const DeepOnetModel& model, const EncodedSet& data, std::span<const std::size_t> indices,
                const TrunkCache& trunk, std::vector<double>* grad);

}  // namespace hints::deeponet::detail
