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
#ifndef CCST_BANK_H_
#define CCST_BANK_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ccst/fft.h"
#include "ccst/io.h"
#include "ccst/rng.h"
#include "ccst/style.h"
#include "ccst/tensor.h"

namespace ccst {

inline constexpr std::size_t kDefaultStylesPerClient = 16;

/// Styles one client uploads: J single-image styles or one overall style.
struct LocalStyleBank {
  ClientId client;
  std::vector<StyleVector> styles;

  StyleKind kind() const { return styles.front().kind; }
  bool operator==(const LocalStyleBank&) const = default;
};

/// Server-side concatenation of every client's local bank. Built once by
/// assemble_bank() and handed to all clients unchanged.
class GlobalStyleBank {
 public:
  GlobalStyleBank(StyleKind mode, std::size_t channels,
                  std::map<ClientId, LocalStyleBank> entries);

  StyleKind mode() const { return mode_; }
  std::size_t channels() const { return channels_; }
  const std::map<ClientId, LocalStyleBank>& entries() const {
    return entries_;
  }
  std::vector<ClientId> clients() const;
  bool contains(ClientId id) const { return entries_.count(id) != 0; }
  const LocalStyleBank& at(ClientId id) const;
  std::size_t style_count() const;

  bool operator==(const GlobalStyleBank&) const = default;

 private:
  StyleKind mode_;
  std::size_t channels_;
  std::map<ClientId, LocalStyleBank> entries_;
};

struct PublishOptions {
  StyleKind mode = StyleKind::kOverall;
  std::size_t styles_per_client = kDefaultStylesPerClient;  // J, single mode
  // Overall mode only: pool at most this many images (drawn without
  // replacement). Unset means every image.
  std::optional<std::size_t> overall_sample;
};

/// Computes the styles a client uploads. Single mode draws J distinct
/// images uniformly; overall mode pools the (optionally subsampled) set.
LocalStyleBank publish_styles(ClientId client,
                              std::span<const ImageTensor> images,
                              const PublishOptions& options,
                              const FeatureSpace& space, Rng& rng);

/// Throws InvalidArgument on an empty input, mixed modes or channel counts,
/// or a repeated client id. The result does not depend on input order.
GlobalStyleBank assemble_bank(std::span<const LocalStyleBank> locals);

// "CCSB" wire format, little-endian:
//   magic "CCSB", u8 version (1), u8 mode (0 overall, 1 single),
//   u16 client_count, u16 channels,
//   per client: u16 client_id, u16 style_count,
//               style_count x (channels f64 mu, channels f64 sigma),
//   u32 CRC32 of every preceding byte.
inline constexpr std::uint8_t kBankFormatVersion = 1;
inline constexpr std::size_t kBankHeaderBytes = 4 + 1 + 1 + 2 + 2;
inline constexpr std::size_t kBankEntryHeaderBytes = 2 + 2;
inline constexpr std::size_t kBankTrailerBytes = 4;

Bytes encode_bank(const GlobalStyleBank& bank);
/// Throws FormatError (bad magic/mode/trailing bytes), VersionError,
/// TruncationError or ChecksumError.
GlobalStyleBank decode_bank(std::span<const std::uint8_t> bytes);

/// Exact encoded size of a bank with the given per-client style counts.
std::size_t encoded_bank_size(std::size_t channels,
                              std::span<const std::size_t> styles_per_client);

/// Amplitude spectra uploaded for the FFT exchange backend. Exchanged
/// in-process only; no wire format.
struct AmplitudeBank {
  StyleKind mode = StyleKind::kOverall;
  std::map<ClientId, std::vector<AmplitudeSpectrum>> entries;

  std::vector<ClientId> clients() const;
  bool contains(ClientId id) const { return entries.count(id) != 0; }
};

/// FFT counterpart of publish_styles: J single-image spectra or the client's
/// mean spectrum.
std::vector<AmplitudeSpectrum> publish_amplitudes(
    std::span<const ImageTensor> images, const PublishOptions& options,
    Rng& rng);

}  // namespace ccst

#endif  // CCST_BANK_H_
