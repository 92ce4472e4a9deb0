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
#include "ccst/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ccst/errors.h"

namespace ccst {
namespace {

using ConstMatMap = Eigen::Map<const RowMatrix>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::RowVectorXd>;
using VecMap = Eigen::Map<Eigen::RowVectorXd>;

constexpr double kStdFloor = 1e-8;

void check_params(const ModelParams& params) {
  if (params.values.size() != params.arch.param_count()) {
    throw InvalidArgument("model: parameter vector has " +
                          std::to_string(params.values.size()) +
                          " entries, architecture needs " +
                          std::to_string(params.arch.param_count()));
  }
  if (params.norm.mean.size() != params.arch.channels ||
      params.norm.stddev.size() != params.arch.channels) {
    throw InvalidArgument("model: input normalization has wrong channel count");
  }
}

void check_labels(const ModelParams& params, std::span<const int> labels,
                  std::size_t rows) {
  if (labels.size() != rows) {
    throw InvalidArgument("model: label count does not match batch");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= params.arch.num_classes) {
      throw InvalidArgument("model: label " + std::to_string(y) +
                            " out of range");
    }
  }
}

// Row-wise softmax in place.
void softmax_rows(RowMatrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

struct Activations {
  std::vector<RowMatrix> pre;   // z_l = a_{l-1} W_l^T + b_l
  std::vector<RowMatrix> post;  // a_l; post[0] is the input
};

Activations run_forward(const ModelParams& params, const RowMatrix& inputs) {
  check_params(params);
  const auto widths = params.arch.widths();
  if (static_cast<std::size_t>(inputs.cols()) != widths.front()) {
    throw InvalidArgument("model: input dimension " +
                          std::to_string(inputs.cols()) + " != " +
                          std::to_string(widths.front()));
  }
  Activations act;
  act.post.push_back(inputs);
  for (std::size_t l = 0; l < params.arch.layer_count(); ++l) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    const double* base = params.values.data() + params.arch.weight_offset(l);
    ConstMatMap w(base, static_cast<Eigen::Index>(out),
                  static_cast<Eigen::Index>(in));
    ConstVecMap b(base + out * in, static_cast<Eigen::Index>(out));
    RowMatrix z = act.post.back() * w.transpose();
    z.rowwise() += b;
    act.pre.push_back(z);
    if (l + 1 < params.arch.layer_count()) {
      act.post.push_back(z.cwiseMax(0.0));
    } else {
      softmax_rows(z);
      act.post.push_back(std::move(z));
    }
  }
  return act;
}

}  // namespace

std::vector<std::size_t> Architecture::widths() const {
  std::vector<std::size_t> w;
  w.push_back(input_dim());
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(num_classes);
  return w;
}

std::size_t Architecture::weight_offset(std::size_t layer) const {
  const auto w = widths();
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += w[l + 1] * (w[l] + 1);
  return off;
}

std::size_t Architecture::param_count() const {
  return weight_offset(layer_count());
}

ModelParams init_params(const Architecture& arch, std::uint64_t seed) {
  if (arch.input_dim() == 0 || arch.num_classes == 0) {
    throw InvalidArgument("init_params: empty architecture");
  }
  for (std::size_t h : arch.hidden) {
    if (h == 0) throw InvalidArgument("init_params: zero-width hidden layer");
  }
  ModelParams p;
  p.arch = arch;
  p.norm.mean.assign(arch.channels, 0.0);
  p.norm.stddev.assign(arch.channels, 1.0);
  p.values.assign(arch.param_count(), 0.0);
  const auto widths = arch.widths();
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    Rng rng(seed, {0, 0, "init", l});
    const double limit =
        std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
    const std::size_t off = arch.weight_offset(l);
    for (std::size_t i = 0; i < widths[l] * widths[l + 1]; ++i) {
      p.values[off + i] = rng.uniform(-limit, limit);
    }
  }
  return p;
}

InputNorm compute_input_norm(std::span<const LabeledImage> images) {
  if (images.empty()) throw InvalidArgument("compute_input_norm: no images");
  std::vector<ImageTensor> tensors;
  tensors.reserve(images.size());
  for (const auto& img : images) tensors.push_back(img.image);
  ChannelStats stats = pooled_channel_mean_std(tensors);
  InputNorm norm{std::move(stats.mu), std::move(stats.sigma)};
  for (double& s : norm.stddev) s = std::max(s, kStdFloor);
  return norm;
}

InputNorm pool_input_norms(std::span<const WeightedNorm> parts) {
  if (parts.empty()) throw InvalidArgument("pool_input_norms: nothing to pool");
  const std::size_t channels = parts.front().norm.mean.size();
  double total = 0.0;
  for (const auto& p : parts) {
    if (p.norm.mean.size() != channels || p.norm.stddev.size() != channels) {
      throw InvalidArgument("pool_input_norms: channel mismatch");
    }
    if (p.weight < 0.0) throw InvalidArgument("pool_input_norms: negative weight");
    total += p.weight;
  }
  if (total <= 0.0) throw InvalidArgument("pool_input_norms: zero total weight");
  InputNorm out;
  out.mean.assign(channels, 0.0);
  out.stddev.assign(channels, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0;
    double second = 0.0;
    for (const auto& p : parts) {
      const double m = p.norm.mean[c];
      const double s = p.norm.stddev[c];
      mean += p.weight * m;
      second += p.weight * (s * s + m * m);
    }
    mean /= total;
    second /= total;
    out.mean[c] = mean;
    out.stddev[c] = std::max(std::sqrt(std::max(second - mean * mean, 0.0)),
                             kStdFloor);
  }
  return out;
}

RowMatrix prepare_inputs(const ModelParams& params,
                         std::span<const ImageTensor> images) {
  check_params(params);
  const Architecture& a = params.arch;
  RowMatrix x(static_cast<Eigen::Index>(images.size()),
              static_cast<Eigen::Index>(a.input_dim()));
  for (std::size_t r = 0; r < images.size(); ++r) {
    const ImageTensor& img = images[r];
    if (img.channels() != a.channels || img.height() != a.height ||
        img.width() != a.width) {
      throw InvalidArgument("model: image shape does not match architecture");
    }
    auto data = img.data();
    const std::size_t n = img.pixels();
    for (std::size_t c = 0; c < a.channels; ++c) {
      const double m = params.norm.mean[c];
      const double inv = 1.0 / params.norm.stddev[c];
      for (std::size_t i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c * n + i)) =
            (data[c * n + i] - m) * inv;
      }
    }
  }
  return x;
}

TrainingSet prepare_inputs(const ModelParams& params,
                           std::span<const LabeledImage> images) {
  std::vector<ImageTensor> tensors;
  TrainingSet set;
  tensors.reserve(images.size());
  for (const auto& img : images) {
    tensors.push_back(img.image);
    set.labels.push_back(img.label);
  }
  set.inputs = prepare_inputs(params, tensors);
  check_labels(params, set.labels, images.size());
  return set;
}

RowMatrix forward(const ModelParams& params, const RowMatrix& inputs) {
  return run_forward(params, inputs).post.back();
}

RowMatrix forward(const ModelParams& params,
                  std::span<const ImageTensor> images) {
  return forward(params, prepare_inputs(params, images));
}

LossAndGrad loss_and_grad(const ModelParams& params, const RowMatrix& inputs,
                          std::span<const int> labels) {
  check_labels(params, labels, static_cast<std::size_t>(inputs.rows()));
  if (inputs.rows() == 0) throw InvalidArgument("loss_and_grad: empty batch");
  Activations act = run_forward(params, inputs);
  const auto widths = params.arch.widths();
  const double batch = static_cast<double>(inputs.rows());

  LossAndGrad out;
  out.grad.assign(params.values.size(), 0.0);
  RowMatrix delta = act.post.back();  // probabilities
  for (Eigen::Index r = 0; r < delta.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    out.loss -= std::log(std::max(delta(r, y), std::numeric_limits<double>::min()));
    delta(r, y) -= 1.0;
  }
  out.loss /= batch;
  delta /= batch;

  for (std::size_t l = params.arch.layer_count(); l-- > 0;) {
    const std::size_t in = widths[l];
    const std::size_t outw = widths[l + 1];
    const std::size_t off = params.arch.weight_offset(l);
    MatMap gw(out.grad.data() + off, static_cast<Eigen::Index>(outw),
              static_cast<Eigen::Index>(in));
    VecMap gb(out.grad.data() + off + outw * in,
              static_cast<Eigen::Index>(outw));
    gw.noalias() = delta.transpose() * act.post[l];
    gb = delta.colwise().sum();
    if (l == 0) break;
    ConstMatMap w(params.values.data() + off, static_cast<Eigen::Index>(outw),
                  static_cast<Eigen::Index>(in));
    RowMatrix back = delta * w;
    delta = back.cwiseProduct(
        (act.pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return out;
}

LossAndGrad loss_and_grad(const ModelParams& params,
                          std::span<const ImageTensor> images,
                          std::span<const int> labels) {
  return loss_and_grad(params, prepare_inputs(params, images), labels);
}

ModelParams sgd_epochs(ModelParams params, const TrainingSet& data,
                       const TrainConfig& config, std::uint64_t client,
                       std::uint64_t round, std::vector<double>* loss_trace) {
  if (data.size() == 0) throw InvalidArgument("sgd_epochs: empty dataset");
  if (config.batch_size == 0) {
    throw InvalidArgument("sgd_epochs: batch size must be at least 1");
  }
  if (!(config.learning_rate >= 0.0)) {
    throw InvalidArgument("sgd_epochs: learning rate must be non-negative");
  }
  check_params(params);
  std::vector<std::size_t> order(data.size());
  RowMatrix batch;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < config.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed, {client, round, "sgd", epoch});
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.resize(static_cast<Eigen::Index>(end - start), data.inputs.cols());
      labels.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.row(static_cast<Eigen::Index>(i - start)) =
            data.inputs.row(static_cast<Eigen::Index>(order[i]));
        labels[i - start] = data.labels[order[i]];
      }
      const LossAndGrad lg = loss_and_grad(params, batch, labels);
      if (loss_trace) loss_trace->push_back(lg.loss);
      for (std::size_t k = 0; k < params.values.size(); ++k) {
        params.values[k] -= config.learning_rate * lg.grad[k];
      }
    }
  }
  return params;
}

double evaluate(const ModelParams& params, const TrainingSet& data) {
  if (data.size() == 0) throw InvalidArgument("evaluate: empty dataset");
  const RowMatrix probs = forward(params, data.inputs);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c) {
      if (probs(r, c) > probs(r, best)) best = c;
    }
    correct += best == data.labels[static_cast<std::size_t>(r)];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate(const ModelParams& params,
                std::span<const LabeledImage> images) {
  if (images.empty()) throw InvalidArgument("evaluate: empty dataset");
  return evaluate(params, prepare_inputs(params, images));
}

Bytes encode_params(const ModelParams& params) {
  check_params(params);
  const Architecture& a = params.arch;
  ByteWriter w;
  w.put_raw("CCTP");
  w.put_u8(1);
  w.put_u16(static_cast<std::uint16_t>(a.channels));
  w.put_u32(static_cast<std::uint32_t>(a.height));
  w.put_u32(static_cast<std::uint32_t>(a.width));
  w.put_u16(static_cast<std::uint16_t>(a.hidden.size()));
  for (std::size_t h : a.hidden) w.put_u32(static_cast<std::uint32_t>(h));
  w.put_u32(static_cast<std::uint32_t>(a.num_classes));
  for (std::size_t c = 0; c < a.channels; ++c) {
    w.put_f64(params.norm.mean[c]);
    w.put_f64(params.norm.stddev[c]);
  }
  w.put_u64(params.values.size());
  for (double v : params.values) w.put_f64(v);
  w.put_u32(crc32(w.bytes()));
  return w.take();
}

ModelParams decode_params(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.get_raw(4) != "CCTP") throw FormatError("not a checkpoint (bad magic)");
  const std::uint8_t version = r.get_u8();
  if (version != 1) {
    throw VersionError("checkpoint version " + std::to_string(version) +
                       " is not supported");
  }
  if (bytes.size() < 4 + 4) throw TruncationError("checkpoint truncated");
  ModelParams p;
  Architecture& a = p.arch;
  a.channels = r.get_u16();
  a.height = r.get_u32();
  a.width = r.get_u32();
  a.hidden.resize(r.get_u16());
  for (auto& h : a.hidden) h = r.get_u32();
  a.num_classes = r.get_u32();
  for (std::size_t c = 0; c < a.channels; ++c) {
    p.norm.mean.push_back(r.get_f64());
    p.norm.stddev.push_back(r.get_f64());
  }
  const std::uint64_t count = r.get_u64();
  if (count > r.remaining() / 8) throw TruncationError("checkpoint truncated");
  p.values.resize(count);
  for (double& v : p.values) v = r.get_f64();
  const std::size_t body = r.position();
  const std::uint32_t stored = r.get_u32();
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint");
  if (crc32(bytes.first(body)) != stored) {
    throw ChecksumError("checkpoint checksum mismatch");
  }
  if (count != a.param_count()) {
    throw DimensionError("checkpoint parameter count does not match its "
                         "architecture");
  }
  return p;
}

}  // namespace ccst
