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
#ifndef CCST_TENSOR_H_
#define CCST_TENSOR_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ccst {

/// Identifies a client (equivalently, a domain) inside a federation.
struct ClientId {
  std::uint16_t value = 0;

  auto operator<=>(const ClientId&) const = default;
};

/// A channels x height x width grid of doubles, stored row-major per channel.
///
/// Instances are immutable once built; every constructor checks that the
/// payload length matches the shape and that all entries are finite.
class ImageTensor {
 public:
  ImageTensor() = default;
  /// Zero-filled tensor.
  ImageTensor(std::size_t channels, std::size_t height, std::size_t width);
  ImageTensor(std::size_t channels, std::size_t height, std::size_t width,
              std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<const double> channel(std::size_t c) const;

  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }

  bool same_shape(const ImageTensor& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

  bool operator==(const ImageTensor&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

struct LabeledImage {
  ImageTensor image;
  int label = 0;
  ClientId domain;
  // Globally unique within a generated corpus; used to audit split
  // membership and target isolation.
  std::uint64_t id = 0;

  bool operator==(const LabeledImage&) const = default;
};

struct ChannelStats {
  std::vector<double> mu;
  std::vector<double> sigma;

  bool operator==(const ChannelStats&) const = default;
};

/// Per-channel mean and population standard deviation.
///
/// Values are summed in sorted order so the result is bit-identical under
/// any permutation of the pixels within a channel.
ChannelStats channel_mean_std(const ImageTensor& image);

/// Statistics pooled over every pixel of every image, as if the images were
/// stacked into one tall feature map. All images must share a channel count.
ChannelStats pooled_channel_mean_std(std::span<const ImageTensor> images);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population standard deviation of a multiset of values, computed
/// order-independently. Sorts `values` in place.
MeanStd sorted_mean_std(std::vector<double>& values);

inline constexpr std::size_t kDefaultHistogramBins = 256;

/// Grey-level pixel counts of an RGB image. Luma is clamped into [0, 1) before
/// binning, so stylized values outside the nominal range land in the end bins.
std::vector<double> grayscale_histogram(
    const ImageTensor& image, std::size_t bins = kDefaultHistogramBins);

inline constexpr double kPsnrCapDb = 120.0;

/// Peak signal-to-noise ratio for peak value 1.0, capped at kPsnrCapDb.
double psnr(const ImageTensor& a, const ImageTensor& b);

double mean_squared_error(const ImageTensor& a, const ImageTensor& b);

}  // namespace ccst

#endif  // CCST_TENSOR_H_
