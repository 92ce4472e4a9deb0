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
#ifndef CCST_FFT_H_
#define CCST_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ccst/tensor.h"

namespace ccst {

using Complex = std::complex<double>;

/// In-place 2-D DFT of a height x width row-major grid. Power-of-two axes use
/// an iterative radix-2 transform; other lengths fall back to a direct DFT.
/// The inverse is scaled by 1/(height*width).
void fft2d(std::vector<Complex>& grid, std::size_t height, std::size_t width,
           bool inverse);

/// Per-channel Fourier magnitudes, laid out like the source image.
struct AmplitudeSpectrum {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> magnitude;

  bool operator==(const AmplitudeSpectrum&) const = default;
};

AmplitudeSpectrum amplitude(const ImageTensor& image);

/// Element-wise mean of the spectra of equally shaped images.
AmplitudeSpectrum overall_amplitude(std::span<const ImageTensor> images);

/// Keeps the content's phase and takes magnitudes from `target` inside a
/// centred low-frequency window. `window` in (0, 1] is the window's
/// half-extent as a fraction of half the axis length; 1 swaps the full
/// spectrum. The imaginary residue of the inverse transform is dropped.
ImageTensor fft_amplitude_exchange(const ImageTensor& content,
                                   const AmplitudeSpectrum& target,
                                   double window = 1.0);

}  // namespace ccst

#endif  // CCST_FFT_H_
