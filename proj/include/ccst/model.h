// Copyright 2026 The CCST Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef CCST_MODEL_H_
#define CCST_MODEL_H_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ccst/io.h"
#include "ccst/rng.h"
#include "ccst/tensor.h"

namespace ccst {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// flatten -> [dense -> ReLU]* -> dense -> softmax.
struct Architecture {
  std::size_t channels = 3;
  std::size_t height = 32;
  std::size_t width = 32;
  std::vector<std::size_t> hidden{256};
  std::size_t num_classes = 4;

  std::size_t input_dim() const { return channels * height * width; }
  /// Widths of every layer boundary: input, hidden..., classes.
  std::vector<std::size_t> widths() const;
  std::size_t param_count() const;
  std::size_t layer_count() const { return hidden.size() + 1; }
  /// Offset of layer l's weights (out x in, row-major) in the flat vector;
  /// its biases follow immediately.
  std::size_t weight_offset(std::size_t layer) const;

  bool operator==(const Architecture&) const = default;
};

/// Per-channel input standardization applied before the first layer. Not
/// trained; fixed for the lifetime of a federation.
struct InputNorm {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const InputNorm&) const = default;
};

struct ModelParams {
  Architecture arch;
  InputNorm norm;
  std::vector<double> values;

  bool operator==(const ModelParams&) const = default;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t local_epochs = 1;
  std::uint64_t seed = 0;
};

/// Glorot-uniform weights, zero biases, identity input normalization.
ModelParams init_params(const Architecture& arch, std::uint64_t seed);

/// Statistics of the pixels of `images` per channel; std floored at 1e-8.
InputNorm compute_input_norm(std::span<const LabeledImage> images);

struct WeightedNorm {
  InputNorm norm;
  double weight = 0.0;  // pixel count behind the statistics
};

/// Pools per-client statistics as if computed over the union.
InputNorm pool_input_norms(std::span<const WeightedNorm> parts);

/// Standardized, flattened inputs plus labels, ready for repeated epochs.
struct TrainingSet {
  RowMatrix inputs;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

TrainingSet prepare_inputs(const ModelParams& params,
                           std::span<const LabeledImage> images);
RowMatrix prepare_inputs(const ModelParams& params,
                         std::span<const ImageTensor> images);

/// Class probabilities, one row per input.
RowMatrix forward(const ModelParams& params, const RowMatrix& inputs);
RowMatrix forward(const ModelParams& params,
                  std::span<const ImageTensor> images);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Mean cross-entropy over the batch and its gradient w.r.t. params.values.
LossAndGrad loss_and_grad(const ModelParams& params, const RowMatrix& inputs,
                          std::span<const int> labels);
LossAndGrad loss_and_grad(const ModelParams& params,
                          std::span<const ImageTensor> images,
                          std::span<const int> labels);

/// Shuffled mini-batch SGD. Shuffles come from the stream
/// (config.seed, client, round, "sgd", epoch). If `loss_trace` is given, the
/// loss of every step is appended to it.
ModelParams sgd_epochs(ModelParams params, const TrainingSet& data,
                       const TrainConfig& config, std::uint64_t client = 0,
                       std::uint64_t round = 0,
                       std::vector<double>* loss_trace = nullptr);

/// Fraction of argmax-correct predictions; ties go to the lowest class index.
double evaluate(const ModelParams& params, const TrainingSet& data);
double evaluate(const ModelParams& params,
                std::span<const LabeledImage> images);

// "CCTP" checkpoints: magic, u8 version, u16 channels, u32 height, u32 width,
// u16 hidden count, hidden x u32, u32 classes, channels x (f64 mean, f64 std),
// u64 parameter count, f64 parameters, u32 CRC32 of the preceding bytes.
Bytes encode_params(const ModelParams& params);
ModelParams decode_params(std::span<const std::uint8_t> bytes);

}  // namespace ccst

#endif  // CCST_MODEL_H_
