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
#include "ccst/style.h"

#include <algorithm>
#include <cmath>

#include "ccst/errors.h"

namespace ccst {
namespace {

// Rows are an orthonormal basis: luminance, red-green, yellow-blue.
const double kOpponent[3][3] = {
    {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
    {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0},
    {1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0)},
};

ImageTensor rotate_pixels(const ImageTensor& image, bool transpose) {
  if (image.channels() != 3) {
    throw InvalidArgument("opponent colour space needs 3 channels");
  }
  const std::size_t n = image.pixels();
  std::vector<double> out(image.size());
  auto in = image.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < 3; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double m = transpose ? kOpponent[c][r] : kOpponent[r][c];
        acc += m * in[c * n + i];
      }
      out[r * n + i] = acc;
    }
  }
  return ImageTensor(3, image.height(), image.width(), std::move(out));
}

StyleVector from_stats(ChannelStats stats, StyleKind kind) {
  StyleVector s;
  s.mu = std::move(stats.mu);
  s.sigma = std::move(stats.sigma);
  s.kind = kind;
  return s;
}

}  // namespace

ImageTensor IdentitySpace::encode(const ImageTensor& image) const {
  if (image.channels() != channels_) {
    throw InvalidArgument("identity space: channel count mismatch");
  }
  return image;
}

ImageTensor IdentitySpace::decode(const ImageTensor& features) const {
  return encode(features);
}

ImageTensor OpponentColorSpace::encode(const ImageTensor& image) const {
  return rotate_pixels(image, false);
}

ImageTensor OpponentColorSpace::decode(const ImageTensor& features) const {
  return rotate_pixels(features, true);
}

std::unique_ptr<FeatureSpace> make_feature_space(const std::string& name) {
  if (name == "identity") return std::make_unique<IdentitySpace>();
  if (name == "opponent") return std::make_unique<OpponentColorSpace>();
  throw InvalidArgument("unknown feature space '" + name + "'");
}

const char* to_string(StyleKind kind) {
  return kind == StyleKind::kOverall ? "overall" : "single";
}

StyleKind parse_style_kind(const std::string& text) {
  if (text == "overall") return StyleKind::kOverall;
  if (text == "single") return StyleKind::kSingle;
  throw InvalidArgument("style mode must be 'single' or 'overall', got '" +
                        text + "'");
}

StyleVector extract_style(const ImageTensor& image, const FeatureSpace& space) {
  return from_stats(channel_mean_std(space.encode(image)), StyleKind::kSingle);
}

StyleVector extract_overall_style(std::span<const ImageTensor> images,
                                  const FeatureSpace& space) {
  if (images.empty()) {
    throw InvalidArgument("extract_overall_style: no images");
  }
  std::vector<ImageTensor> encoded;
  encoded.reserve(images.size());
  for (const auto& img : images) encoded.push_back(space.encode(img));
  return from_stats(pooled_channel_mean_std(encoded), StyleKind::kOverall);
}

ImageTensor adain(const ImageTensor& content, const StyleVector& style,
                  double epsilon) {
  if (style.mu.size() != content.channels() ||
      style.sigma.size() != content.channels()) {
    throw InvalidArgument("adain: content has " +
                          std::to_string(content.channels()) +
                          " channels, style has " +
                          std::to_string(style.mu.size()));
  }
  const ChannelStats own = channel_mean_std(content);
  const std::size_t n = content.pixels();
  std::vector<double> out(content.size());
  auto in = content.data();
  for (std::size_t c = 0; c < content.channels(); ++c) {
    const double scale = style.sigma[c] / std::max(own.sigma[c], epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = c * n + i;
      out[k] = scale * (in[k] - own.mu[c]) + style.mu[c];
    }
  }
  return ImageTensor(content.channels(), content.height(), content.width(),
                     std::move(out));
}

ImageTensor generate(const ImageTensor& content, const StyleVector& style,
                     const FeatureSpace& space) {
  return space.decode(adain(space.encode(content), style));
}

}  // namespace ccst
