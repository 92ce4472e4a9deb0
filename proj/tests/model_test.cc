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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ccst/errors.h"
#include "ccst/model.h"
#include "test_util.h"

namespace ccst {
namespace {

using testing::random_image;

Architecture small_arch(std::vector<std::size_t> hidden = {10}) {
  Architecture a;
  a.channels = 3;
  a.height = 4;
  a.width = 4;
  a.hidden = std::move(hidden);
  a.num_classes = 4;
  return a;
}

ModelParams jittered_params(const Architecture& arch, std::uint64_t seed) {
  ModelParams p = init_params(arch, seed);
  Rng rng(seed, {0, 0, "jitter"});
  for (double& v : p.values) v += rng.uniform(-0.2, 0.2);
  p.norm.mean = {0.4, 0.5, 0.6};
  p.norm.stddev = {0.3, 0.2, 0.25};
  return p;
}

std::vector<ImageTensor> random_batch(Rng& rng, std::size_t n) {
  std::vector<ImageTensor> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_image(rng, 3, 4, 4));
  return out;
}

TEST(ArchitectureTest, ParameterLayout) {
  const auto a = small_arch({10, 6});
  EXPECT_EQ(a.input_dim(), 48u);
  EXPECT_EQ(a.param_count(), 48u * 10 + 10 + 10 * 6 + 6 + 6 * 4 + 4);
  EXPECT_EQ(a.weight_offset(0), 0u);
  EXPECT_EQ(a.weight_offset(1), 490u);
  EXPECT_EQ(a.weight_offset(2), 490u + 66u);
  EXPECT_EQ(init_params(a, 1).values.size(), a.param_count());
}

TEST(InitParamsTest, GlorotBoundsAndZeroBias) {
  const auto a = small_arch({10});
  const auto p = init_params(a, 7);
  const double bound0 = std::sqrt(6.0 / (48 + 10));
  for (std::size_t i = 0; i < 480; ++i) EXPECT_LE(std::abs(p.values[i]), bound0);
  for (std::size_t i = 480; i < 490; ++i) EXPECT_EQ(p.values[i], 0.0);
  EXPECT_EQ(init_params(a, 7), p);
  EXPECT_NE(init_params(a, 8), p);
}

TEST(ForwardTest, RowsAreSimplices) {
  Rng rng(1, {0, 0, "forward"});
  const auto p = jittered_params(small_arch({10, 6}), 1);
  const auto probs = forward(p, random_batch(rng, 9));
  ASSERT_EQ(probs.rows(), 9);
  ASSERT_EQ(probs.cols(), 4);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    EXPECT_NEAR(probs.row(r).sum(), 1.0, 1e-9);
    EXPECT_GE(probs.row(r).minCoeff(), 0.0);
  }
}

TEST(ForwardTest, ZeroFinalLayerIsUniform) {
  Rng rng(2, {0, 0, "uniform"});
  auto p = jittered_params(small_arch(), 2);
  const std::size_t last = p.arch.weight_offset(p.arch.layer_count() - 1);
  std::fill(p.values.begin() + static_cast<std::ptrdiff_t>(last), p.values.end(), 0.0);
  const auto imgs = random_batch(rng, 5);
  const auto probs = forward(p, imgs);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      EXPECT_NEAR(probs(r, c), 0.25, 1e-15);
    }
  }
  const std::vector<int> labels{0, 1, 2, 3, 0};
  EXPECT_NEAR(loss_and_grad(p, imgs, labels).loss, std::log(4.0), 1e-12);
}

TEST(ForwardTest, BatchCompositionDoesNotMatter) {
  Rng rng(3, {0, 0, "batch"});
  const auto p = jittered_params(small_arch(), 3);
  const auto imgs = random_batch(rng, 6);
  const auto together = forward(p, imgs);
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const auto alone = forward(p, std::span<const ImageTensor>(&imgs[i], 1));
    for (Eigen::Index c = 0; c < 4; ++c) {
      EXPECT_NEAR(alone(0, c), together(static_cast<Eigen::Index>(i), c), 1e-14);
    }
  }
  std::vector<ImageTensor> dup{imgs[0], imgs[0]};
  const auto d = forward(p, dup);
  EXPECT_EQ(RowMatrix(d.row(0)), RowMatrix(d.row(1)));
}

TEST(ForwardTest, DimensionMismatchThrows) {
  const auto p = jittered_params(small_arch(), 4);
  Rng rng(4, {0, 0, "dims"});
  const std::vector<ImageTensor> wrong{random_image(rng, 3, 5, 4)};
  EXPECT_THROW(forward(p, wrong), InvalidArgument);
  EXPECT_THROW(forward(p, RowMatrix::Zero(2, 47)), InvalidArgument);
}

// Oracle: central finite differences of the loss, 50 coordinates per layer.
TEST(LossAndGradTest, MatchesFiniteDifferences) {
  Rng rng(5, {0, 0, "fd"});
  auto p = jittered_params(small_arch({10, 6}), 5);
  const auto imgs = random_batch(rng, 7);
  const std::vector<int> labels{0, 3, 1, 2, 2, 0, 1};
  const RowMatrix x = prepare_inputs(p, imgs);
  const auto lg = loss_and_grad(p, x, labels);
  ASSERT_EQ(lg.grad.size(), p.values.size());
  const double h = 1e-6;
  for (std::size_t layer = 0; layer < p.arch.layer_count(); ++layer) {
    const std::size_t begin = p.arch.weight_offset(layer);
    const std::size_t end = layer + 1 < p.arch.layer_count()
                                ? p.arch.weight_offset(layer + 1)
                                : p.values.size();
    for (int t = 0; t < 50; ++t) {
      const std::size_t k = begin + rng.below(end - begin);
      const double saved = p.values[k];
      p.values[k] = saved + h;
      const double up = loss_and_grad(p, x, labels).loss;
      p.values[k] = saved - h;
      const double down = loss_and_grad(p, x, labels).loss;
      p.values[k] = saved;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(lg.grad[k]), 1e-6});
      EXPECT_LT(std::abs(numeric - lg.grad[k]) / scale, 1e-4)
          << "layer " << layer << " coordinate " << k;
    }
  }
}

TEST(LossAndGradTest, DuplicatedBatchHasSameGradient) {
  Rng rng(6, {0, 0, "dup"});
  const auto p = jittered_params(small_arch(), 6);
  const auto imgs = random_batch(rng, 3);
  std::vector<ImageTensor> twice = imgs;
  twice.insert(twice.end(), imgs.begin(), imgs.end());
  const std::vector<int> labels{1, 2, 3};
  const std::vector<int> labels2{1, 2, 3, 1, 2, 3};
  const auto a = loss_and_grad(p, imgs, labels);
  const auto b = loss_and_grad(p, twice, labels2);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  for (std::size_t k = 0; k < a.grad.size(); ++k) {
    EXPECT_NEAR(a.grad[k], b.grad[k], 1e-14);
  }
}

TEST(LossAndGradTest, BadLabelsThrow) {
  Rng rng(7, {0, 0, "labels"});
  const auto p = jittered_params(small_arch(), 7);
  const auto imgs = random_batch(rng, 2);
  const std::vector<int> bad{0, 4};
  const std::vector<int> neg{-1, 0};
  const std::vector<int> short_labels{0};
  EXPECT_THROW(loss_and_grad(p, imgs, bad), InvalidArgument);
  EXPECT_THROW(loss_and_grad(p, imgs, neg), InvalidArgument);
  EXPECT_THROW(loss_and_grad(p, imgs, short_labels), InvalidArgument);
}

std::vector<LabeledImage> labeled(Rng& rng, std::size_t n) {
  std::vector<LabeledImage> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({random_image(rng, 3, 4, 4), static_cast<int>(i % 4),
                   ClientId{0}, i});
  }
  return out;
}

TEST(SgdTest, ZeroLearningRateLeavesParams) {
  Rng rng(8, {0, 0, "sgd0"});
  const auto p = jittered_params(small_arch(), 8);
  const auto imgs = labeled(rng, 10);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.batch_size = 3;
  cfg.local_epochs = 2;
  EXPECT_EQ(sgd_epochs(p, prepare_inputs(p, imgs), cfg), p);
}

TEST(SgdTest, SingleSampleLossDecreases) {
  Rng rng(9, {0, 0, "sgd1"});
  const auto p = jittered_params(small_arch(), 9);
  const auto imgs = labeled(rng, 1);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 1;
  cfg.local_epochs = 201;
  std::vector<double> trace;
  const auto trained = sgd_epochs(p, prepare_inputs(p, imgs), cfg, 0, 0, &trace);
  ASSERT_EQ(trace.size(), 201u);
  int decreases = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) decreases += trace[i] < trace[i - 1];
  EXPECT_GE(decreases, 190);
  EXPECT_LT(trace.back(), trace.front());
}

TEST(SgdTest, DeterministicAndMemorizes) {
  Rng rng(10, {0, 0, "sgd2"});
  const auto p = jittered_params(small_arch(), 10);
  const auto imgs = labeled(rng, 1);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.batch_size = 1;
  cfg.local_epochs = 100;
  cfg.seed = 3;
  const auto data = prepare_inputs(p, imgs);
  const auto a = sgd_epochs(p, data, cfg);
  EXPECT_EQ(sgd_epochs(p, data, cfg), a);
  EXPECT_EQ(evaluate(a, imgs), 1.0);
}

TEST(EvaluateTest, UniformModelAndOrderInvariance) {
  Rng rng(11, {0, 0, "eval"});
  auto p = jittered_params(small_arch(), 11);
  auto imgs = labeled(rng, 40);
  const double acc = evaluate(p, imgs);
  std::reverse(imgs.begin(), imgs.end());
  EXPECT_EQ(evaluate(p, imgs), acc);
  // A zero final layer ties every class, so argmax picks class 0 everywhere.
  std::fill(p.values.begin() + static_cast<std::ptrdiff_t>(p.arch.weight_offset(1)),
            p.values.end(), 0.0);
  EXPECT_EQ(evaluate(p, imgs), 0.25);
  EXPECT_THROW(evaluate(p, std::span<const LabeledImage>{}), InvalidArgument);
}

TEST(InputNormTest, ComputeAndPool) {
  Rng rng(12, {0, 0, "norm"});
  const auto a = labeled(rng, 5);
  const auto b = labeled(rng, 15);
  std::vector<LabeledImage> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto na = compute_input_norm(a);
  const auto nb = compute_input_norm(b);
  const auto pooled = pool_input_norms(std::vector<WeightedNorm>{
      {na, 5.0 * 16}, {nb, 15.0 * 16}});
  const auto direct = compute_input_norm(all);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(pooled.mean[c], direct.mean[c], 1e-12);
    EXPECT_NEAR(pooled.stddev[c], direct.stddev[c], 1e-12);
  }
}

TEST(CheckpointTest, RoundTripAndErrors) {
  const auto p = jittered_params(small_arch({10, 6}), 13);
  const auto bytes = encode_params(p);
  EXPECT_EQ(decode_params(bytes), p);
  auto bad = bytes;
  bad[bad.size() / 2] ^= 0x04;
  EXPECT_THROW(decode_params(bad), ChecksumError);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 9);
  EXPECT_THROW(decode_params(cut), TruncationError);
  auto magic = bytes;
  magic[1] = 'X';
  EXPECT_THROW(decode_params(magic), FormatError);
}

}  // namespace
}  // namespace ccst
