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
#ifndef CCST_STYLE_H_
#define CCST_STYLE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccst/tensor.h"

namespace ccst {

/// An invertible encoder/decoder pair in which style statistics are taken.
///
/// decode(encode(x)) must reproduce x to 1e-9 max-abs error.
class FeatureSpace {
 public:
  virtual ~FeatureSpace() = default;

  virtual std::string name() const = 0;
  /// Channel count of encoded features (the length of a style vector).
  virtual std::size_t channels() const = 0;
  virtual ImageTensor encode(const ImageTensor& image) const = 0;
  virtual ImageTensor decode(const ImageTensor& features) const = 0;
};

/// Pixel space: encode and decode are the identity.
class IdentitySpace final : public FeatureSpace {
 public:
  explicit IdentitySpace(std::size_t channels = 3) : channels_(channels) {}

  std::string name() const override { return "identity"; }
  std::size_t channels() const override { return channels_; }
  ImageTensor encode(const ImageTensor& image) const override;
  ImageTensor decode(const ImageTensor& features) const override;

 private:
  std::size_t channels_;
};

/// RGB -> orthonormal opponent-colour basis (luminance, red-green,
/// yellow-blue). A per-pixel rotation, so decode is the transpose.
class OpponentColorSpace final : public FeatureSpace {
 public:
  std::string name() const override { return "opponent"; }
  std::size_t channels() const override { return 3; }
  ImageTensor encode(const ImageTensor& image) const override;
  ImageTensor decode(const ImageTensor& features) const override;
};

/// Looks up a space by name ("identity" or "opponent").
std::unique_ptr<FeatureSpace> make_feature_space(const std::string& name);

enum class StyleKind : std::uint8_t { kOverall = 0, kSingle = 1 };

const char* to_string(StyleKind kind);
StyleKind parse_style_kind(const std::string& text);

/// Channel-wise (mean, std) of an encoded feature map.
struct StyleVector {
  std::vector<double> mu;
  std::vector<double> sigma;
  StyleKind kind = StyleKind::kSingle;
  // Index of the source image within its client, for single styles computed
  // locally. Client-local bookkeeping: it never goes on the wire and is not
  // part of a style's identity.
  std::optional<std::uint32_t> image_index;

  std::size_t channels() const { return mu.size(); }

  bool operator==(const StyleVector& other) const {
    return mu == other.mu && sigma == other.sigma && kind == other.kind;
  }
};

StyleVector extract_style(const ImageTensor& image, const FeatureSpace& space);

/// Style of a whole client: statistics over every pixel of every encoded
/// image. Throws InvalidArgument on an empty sequence.
StyleVector extract_overall_style(std::span<const ImageTensor> images,
                                  const FeatureSpace& space);

/// Denominator floor for constant channels.
inline constexpr double kAdainEpsilon = 1e-5;

/// Re-normalizes each channel of `content` to the style's mean and std:
///   out = sigma_s * (in - mu_c) / max(sigma_c, eps) + mu_s
ImageTensor adain(const ImageTensor& content, const StyleVector& style,
                  double epsilon = kAdainEpsilon);

/// decode(adain(encode(content), style)).
ImageTensor generate(const ImageTensor& content, const StyleVector& style,
                     const FeatureSpace& space);

}  // namespace ccst

#endif  // CCST_STYLE_H_
