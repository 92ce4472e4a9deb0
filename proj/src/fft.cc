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
#include "ccst/fft.h"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "ccst/errors.h"

namespace ccst {
namespace {

void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Twiddles are evaluated directly rather than by repeated
        // multiplication so large transforms do not accumulate drift.
        const Complex w = std::polar(1.0, ang * static_cast<double>(k));
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

void dft_direct(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  std::vector<Complex> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * std::numbers::pi *
                         static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += a[t] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  a = std::move(out);
}

void transform_1d(std::vector<Complex>& a, bool inverse) {
  if (a.size() <= 1) return;
  if (std::has_single_bit(a.size())) {
    fft_pow2(a, inverse);
  } else {
    dft_direct(a, inverse);
  }
}

// Signed frequency of bin k on an axis of length n.
long signed_frequency(std::size_t k, std::size_t n) {
  const long lk = static_cast<long>(k);
  const long ln = static_cast<long>(n);
  return 2 * lk < ln ? lk : lk - ln;
}

std::vector<Complex> channel_spectrum(const ImageTensor& image, std::size_t c) {
  auto ch = image.channel(c);
  std::vector<Complex> grid(ch.begin(), ch.end());
  fft2d(grid, image.height(), image.width(), false);
  return grid;
}

}  // namespace

void fft2d(std::vector<Complex>& grid, std::size_t height, std::size_t width,
           bool inverse) {
  if (grid.size() != height * width) {
    throw InvalidArgument("fft2d: grid size does not match shape");
  }
  std::vector<Complex> line(width);
  for (std::size_t y = 0; y < height; ++y) {
    std::copy_n(grid.begin() + y * width, width, line.begin());
    transform_1d(line, inverse);
    std::copy(line.begin(), line.end(), grid.begin() + y * width);
  }
  line.resize(height);
  for (std::size_t x = 0; x < width; ++x) {
    for (std::size_t y = 0; y < height; ++y) line[y] = grid[y * width + x];
    transform_1d(line, inverse);
    for (std::size_t y = 0; y < height; ++y) grid[y * width + x] = line[y];
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(height * width);
    for (auto& v : grid) v *= scale;
  }
}

AmplitudeSpectrum amplitude(const ImageTensor& image) {
  AmplitudeSpectrum spec{image.channels(), image.height(), image.width(), {}};
  spec.magnitude.reserve(image.size());
  for (std::size_t c = 0; c < image.channels(); ++c) {
    for (const Complex& v : channel_spectrum(image, c)) {
      spec.magnitude.push_back(std::abs(v));
    }
  }
  return spec;
}

AmplitudeSpectrum overall_amplitude(std::span<const ImageTensor> images) {
  if (images.empty()) throw InvalidArgument("overall_amplitude: no images");
  AmplitudeSpectrum sum = amplitude(images.front());
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (!images[i].same_shape(images.front())) {
      throw InvalidArgument("overall_amplitude: images differ in shape");
    }
    const AmplitudeSpectrum a = amplitude(images[i]);
    for (std::size_t k = 0; k < sum.magnitude.size(); ++k) {
      sum.magnitude[k] += a.magnitude[k];
    }
  }
  const double n = static_cast<double>(images.size());
  for (double& m : sum.magnitude) m /= n;
  return sum;
}

ImageTensor fft_amplitude_exchange(const ImageTensor& content,
                                   const AmplitudeSpectrum& target,
                                   double window) {
  if (target.channels != content.channels() ||
      target.height != content.height() || target.width != content.width()) {
    throw InvalidArgument("fft_amplitude_exchange: shape mismatch");
  }
  if (!(window > 0.0 && window <= 1.0)) {
    throw InvalidArgument("fft_amplitude_exchange: window must be in (0, 1]");
  }
  const std::size_t h = content.height();
  const std::size_t w = content.width();
  const auto reach_y = static_cast<long>(std::floor(window * h / 2.0));
  const auto reach_x = static_cast<long>(std::floor(window * w / 2.0));
  std::vector<double> out;
  out.reserve(content.size());
  for (std::size_t c = 0; c < content.channels(); ++c) {
    std::vector<Complex> spec = channel_spectrum(content, c);
    for (std::size_t y = 0; y < h; ++y) {
      if (std::labs(signed_frequency(y, h)) > reach_y) continue;
      for (std::size_t x = 0; x < w; ++x) {
        if (std::labs(signed_frequency(x, w)) > reach_x) continue;
        Complex& v = spec[y * w + x];
        v = std::polar(target.magnitude[(c * h + y) * w + x], std::arg(v));
      }
    }
    fft2d(spec, h, w, true);
    for (const Complex& v : spec) out.push_back(v.real());
  }
  return ImageTensor(content.channels(), h, w, std::move(out));
}

}  // namespace ccst
