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
#ifndef CCST_AUGMENT_H_
#define CCST_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ccst/bank.h"
#include "ccst/style.h"
#include "ccst/tensor.h"

namespace ccst {

enum class TransferBackend : std::uint8_t { kAdain, kFft };

const char* to_string(TransferBackend backend);
TransferBackend parse_backend(const std::string& text);

struct AugmentConfig {
  std::size_t k = 1;  // augmentation level, 1 <= k <= number of bank clients
  StyleKind mode = StyleKind::kOverall;
  TransferBackend backend = TransferBackend::kAdain;
  std::uint64_t seed = 0;
  double fft_window = 1.0;
};

enum class EntryOrigin : std::uint8_t { kOriginal, kStylized };

struct AugmentedEntry {
  LabeledImage sample;
  EntryOrigin origin = EntryOrigin::kOriginal;
  ClientId style_source;  // client whose style was applied (self if original)

  bool operator==(const AugmentedEntry&) const = default;
};

struct AugmentedDataset {
  std::vector<AugmentedEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::size_t original_count() const;
  std::vector<LabeledImage> samples() const;

  bool operator==(const AugmentedDataset&) const = default;
};

/// Local cross-client style transfer at client `self`.
///
/// For every input image, k distinct bank clients are drawn without
/// replacement. Drawing `self` appends the image verbatim; any other client
/// contributes a stylized copy (its overall style, or one of its single
/// styles drawn uniformly). Output is image-major in draw order, and each
/// image's draws come from its own stream keyed by (seed, self, index).
AugmentedDataset augment_client(std::span<const LabeledImage> images,
                                const GlobalStyleBank& bank,
                                const AugmentConfig& config, ClientId self,
                                const FeatureSpace& space);

/// Same sampling law, FFT amplitude exchange as the transfer.
AugmentedDataset augment_client(std::span<const LabeledImage> images,
                                const AmplitudeBank& bank,
                                const AugmentConfig& config, ClientId self);

/// Wraps a dataset without augmentation (every entry original).
AugmentedDataset passthrough(std::span<const LabeledImage> images);

struct SweepCell {
  StyleKind mode;
  std::size_t k;
  AugmentedDataset data;
};

/// The {single, overall} x {1..N} control grid for one client. Every cell uses
/// `base.seed`, so a cell equals a standalone augment_client call.
std::vector<SweepCell> sweep_grid(std::span<const LabeledImage> images,
                                  const GlobalStyleBank& single_bank,
                                  const GlobalStyleBank& overall_bank,
                                  const AugmentConfig& base, ClientId self,
                                  const FeatureSpace& space);

/// Writes one .cct per entry plus manifest.tsv with columns
/// path, label, domain, origin, style source, source image id.
void write_augmented(const std::filesystem::path& dir,
                     const AugmentedDataset& data);

}  // namespace ccst

#endif  // CCST_AUGMENT_H_
