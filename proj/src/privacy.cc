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
#include "ccst/privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "ccst/errors.h"

namespace ccst {
namespace {

double style_residual(const StyleVector& a, const StyleVector& b) {
  double r = 0.0;
  for (std::size_t c = 0; c < a.mu.size(); ++c) {
    const double dm = a.mu[c] - b.mu[c];
    const double ds = a.sigma[c] - b.sigma[c];
    r += dm * dm + ds * ds;
  }
  return r;
}

ImageTensor permute_pixels(const ImageTensor& image,
                           const std::vector<std::size_t>& perm) {
  const std::size_t n = image.pixels();
  std::vector<double> out(image.size());
  auto in = image.data();
  for (std::size_t c = 0; c < image.channels(); ++c) {
    for (std::size_t i = 0; i < n; ++i) out[c * n + i] = in[c * n + perm[i]];
  }
  return ImageTensor(image.channels(), image.height(), image.width(),
                     std::move(out));
}

bool same_pixel(const ImageTensor& image, std::size_t a, std::size_t b) {
  const std::size_t n = image.pixels();
  auto d = image.data();
  for (std::size_t c = 0; c < image.channels(); ++c) {
    if (d[c * n + a] != d[c * n + b]) return false;
  }
  return true;
}

}  // namespace

Reconstruction invert_style(const StyleVector& target, const TensorShape& shape,
                            const FeatureSpace& space,
                            const AttackConfig& config, Rng& rng) {
  if (target.mu.size() != shape.channels ||
      target.sigma.size() != shape.channels) {
    throw InvalidArgument("invert_style: style and shape disagree on channels");
  }
  if (config.iterations == 0) {
    throw InvalidArgument("invert_style: need at least one iteration");
  }
  const std::size_t n = shape.height * shape.width;
  std::vector<double> x(shape.channels * n);
  for (double& v : x) v = rng.uniform();

  std::vector<double> best = x;
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  for (std::size_t it = 0; it <= config.iterations; ++it) {
    double residual = 0.0;
    std::vector<double> mu(shape.channels);
    std::vector<double> sigma(shape.channels);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      scratch.assign(x.begin() + c * n, x.begin() + (c + 1) * n);
      const MeanStd ms = sorted_mean_std(scratch);
      mu[c] = ms.mean;
      sigma[c] = ms.stddev;
      const double dm = mu[c] - target.mu[c];
      const double ds = sigma[c] - target.sigma[c];
      residual += dm * dm + ds * ds;
    }
    if (residual < best_residual) {
      best_residual = residual;
      best = x;
    }
    if (it == config.iterations || residual == 0.0) break;
    for (std::size_t c = 0; c < shape.channels; ++c) {
      // n * dL/dx_i = 2 (mu - t_mu) + 2 (sigma - t_sigma) (x_i - mu) / sigma
      const double gm = 2.0 * (mu[c] - target.mu[c]);
      const double gs =
          sigma[c] > 0.0 ? 2.0 * (sigma[c] - target.sigma[c]) / sigma[c] : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double& v = x[c * n + i];
        v -= config.step * (gm + gs * (v - mu[c]));
      }
    }
  }
  Reconstruction out;
  out.image = space.decode(
      ImageTensor(shape.channels, shape.height, shape.width, std::move(best)));
  out.residual = style_residual(extract_style(out.image, space), target);
  out.iterations = config.iterations;
  return out;
}

ImageTensor mean_image(std::span<const ImageTensor> images) {
  if (images.empty()) throw InvalidArgument("mean_image: no images");
  std::vector<double> sum(images.front().size(), 0.0);
  for (const auto& img : images) {
    if (!img.same_shape(images.front())) {
      throw InvalidArgument("mean_image: shape mismatch");
    }
    auto d = img.data();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
  }
  for (double& v : sum) v /= static_cast<double>(images.size());
  const ImageTensor& f = images.front();
  return ImageTensor(f.channels(), f.height(), f.width(), std::move(sum));
}

AttackReport score_attack(const Reconstruction& reconstruction,
                          std::span<const ImageTensor> ground_truth,
                          const ImageTensor& mean) {
  if (ground_truth.empty()) {
    throw InvalidArgument("score_attack: no ground-truth candidates");
  }
  AttackReport r;
  r.residual = reconstruction.residual;
  r.iterations = reconstruction.iterations;
  for (const auto& gt : ground_truth) {
    r.candidate_psnr.push_back(psnr(reconstruction.image, gt));
    r.baseline_psnr.push_back(psnr(mean, gt));
  }
  r.best_psnr = *std::max_element(r.candidate_psnr.begin(),
                                  r.candidate_psnr.end());
  r.best_baseline_psnr = *std::max_element(r.baseline_psnr.begin(),
                                           r.baseline_psnr.end());
  return r;
}

std::pair<ImageTensor, ImageTensor> non_injectivity_witness(
    const ImageTensor& image, Rng& rng) {
  const std::size_t n = image.pixels();
  std::size_t other = n;
  for (std::size_t i = 1; i < n && other == n; ++i) {
    if (!same_pixel(image, 0, i)) other = i;
  }
  if (other == n) {
    throw InvalidArgument(
        "non_injectivity_witness: constant image has no distinct permutation");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (int attempt = 0; attempt < 8; ++attempt) {
    rng.shuffle(perm);
    ImageTensor permuted = permute_pixels(image, perm);
    if (permuted != image) return {image, std::move(permuted)};
  }
  // Shuffles kept landing on equal images; a single transposition of two
  // different pixels always works.
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::swap(perm[0], perm[other]);
  return {image, permute_pixels(image, perm)};
}

std::string format_attack_report(std::span<const AttackReport> reports) {
  std::ostringstream out;
  out << "attack,iterations,residual,best_psnr_db,baseline_psnr_db,margin_db\n";
  char buf[160];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6e,%.4f,%.4f,%.4f\n", i,
                  r.iterations, r.residual, r.best_psnr, r.best_baseline_psnr,
                  r.best_psnr - r.best_baseline_psnr);
    out << buf;
  }
  return out.str();
}

}  // namespace ccst
