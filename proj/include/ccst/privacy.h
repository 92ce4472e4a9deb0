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
#ifndef CCST_PRIVACY_H_
#define CCST_PRIVACY_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccst/rng.h"
#include "ccst/style.h"
#include "ccst/tensor.h"

namespace ccst {

struct TensorShape {
  std::size_t channels = 3;
  std::size_t height = 32;
  std::size_t width = 32;
};

struct AttackConfig {
  std::size_t iterations = 2000;
  double step = 0.1;
};

struct Reconstruction {
  ImageTensor image;
  double residual = 0.0;  // ||SE(image) - target||^2 over mu and sigma
  std::size_t iterations = 0;
};

/// Optimization attacker: starting from uniform noise, runs gradient descent
/// on the encoded feature map to match `target`, then decodes. The gradient
/// is scaled by the per-channel pixel count so the step size does not depend
/// on resolution. Only the style vector and a shape are visible here.
Reconstruction invert_style(const StyleVector& target, const TensorShape& shape,
                            const FeatureSpace& space,
                            const AttackConfig& config, Rng& rng);

struct AttackReport {
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> candidate_psnr;  // reconstruction vs each ground truth
  std::vector<double> baseline_psnr;   // mean image vs each ground truth
  double best_psnr = 0.0;
  double best_baseline_psnr = 0.0;
};

/// Scores a reconstruction against ground-truth candidates and against the
/// PSNR the dataset mean image already achieves.
AttackReport score_attack(const Reconstruction& reconstruction,
                          std::span<const ImageTensor> ground_truth,
                          const ImageTensor& mean_image);

/// Pixel-wise mean of equally shaped images.
ImageTensor mean_image(std::span<const ImageTensor> images);

/// Returns (image, spatially permuted image): distinct pixels, identical style.
/// Throws InvalidArgument if every pixel is the same (no witness exists).
std::pair<ImageTensor, ImageTensor> non_injectivity_witness(
    const ImageTensor& image, Rng& rng);

std::string format_attack_report(std::span<const AttackReport> reports);

}  // namespace ccst

#endif  // CCST_PRIVACY_H_
