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
#include "ccst/tensor.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccst/errors.h"

namespace ccst {

ImageTensor::ImageTensor(std::size_t channels, std::size_t height,
                         std::size_t width)
    : ImageTensor(channels, height, width,
                  std::vector<double>(channels * height * width, 0.0)) {}

ImageTensor::ImageTensor(std::size_t channels, std::size_t height,
                         std::size_t width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width),
      data_(std::move(data)) {
  if (channels == 0 || height == 0 || width == 0) {
    throw InvalidArgument("ImageTensor: dimensions must be positive");
  }
  if (data_.size() != channels * height * width) {
    throw InvalidArgument("ImageTensor: payload has " +
                          std::to_string(data_.size()) + " values, shape needs " +
                          std::to_string(channels * height * width));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("ImageTensor: non-finite entry");
    }
  }
}

std::span<const double> ImageTensor::channel(std::size_t c) const {
  return std::span<const double>(data_).subspan(c * pixels(), pixels());
}

MeanStd sorted_mean_std(std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  out.mean = sum / n;
  double sq = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    sq += d * d;
  }
  out.stddev = std::sqrt(sq / n);
  return out;
}

ChannelStats channel_mean_std(const ImageTensor& image) {
  return pooled_channel_mean_std(std::span<const ImageTensor>(&image, 1));
}

ChannelStats pooled_channel_mean_std(std::span<const ImageTensor> images) {
  if (images.empty()) {
    throw InvalidArgument("pooled_channel_mean_std: no images");
  }
  const std::size_t channels = images.front().channels();
  std::size_t total = 0;
  for (const auto& img : images) {
    if (img.channels() != channels) {
      throw InvalidArgument("pooled_channel_mean_std: channel count mismatch");
    }
    total += img.pixels();
  }
  ChannelStats stats;
  stats.mu.resize(channels);
  stats.sigma.resize(channels);
  std::vector<double> values;
  values.reserve(total);
  for (std::size_t c = 0; c < channels; ++c) {
    values.clear();
    for (const auto& img : images) {
      auto ch = img.channel(c);
      values.insert(values.end(), ch.begin(), ch.end());
    }
    const MeanStd ms = sorted_mean_std(values);
    stats.mu[c] = ms.mean;
    stats.sigma[c] = ms.stddev;
  }
  return stats;
}

std::vector<double> grayscale_histogram(const ImageTensor& image,
                                        std::size_t bins) {
  if (image.channels() != 3) {
    throw InvalidArgument("grayscale_histogram: expected 3 channels, got " +
                          std::to_string(image.channels()));
  }
  if (bins == 0) throw InvalidArgument("grayscale_histogram: zero bins");
  std::vector<double> hist(bins, 0.0);
  auto r = image.channel(0);
  auto g = image.channel(1);
  auto b = image.channel(2);
  const double top = std::nextafter(1.0, 0.0);
  for (std::size_t i = 0; i < image.pixels(); ++i) {
    // Integer weights keep mid-grey exact: (0.5, 0.5, 0.5) -> 0.5.
    double luma = (299.0 * r[i] + 587.0 * g[i] + 114.0 * b[i]) / 1000.0;
    luma = std::clamp(luma, 0.0, top);
    auto bin = static_cast<std::size_t>(luma * static_cast<double>(bins));
    hist[std::min(bin, bins - 1)] += 1.0;
  }
  return hist;
}

double mean_squared_error(const ImageTensor& a, const ImageTensor& b) {
  if (!a.same_shape(b)) {
    throw InvalidArgument("mean_squared_error: shape mismatch");
  }
  auto da = a.data();
  auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
  const double mse = mean_squared_error(a, b);
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

}  // namespace ccst
