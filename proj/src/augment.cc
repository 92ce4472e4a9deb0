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
#include "ccst/augment.h"

#include <cstdio>

#include "ccst/errors.h"
#include "ccst/io.h"
#include "ccst/rng.h"

namespace ccst {
namespace {

void check_k(std::size_t k, std::size_t clients) {
  if (k == 0 || k > clients) {
    throw InvalidArgument("augmentation level K=" + std::to_string(k) +
                          " must be in [1, " + std::to_string(clients) + "]");
  }
}

// Shared sampling loop; `stylize(image, source, rng)` does the transfer.
template <typename Stylize>
AugmentedDataset run_algorithm(std::span<const LabeledImage> images,
                               const std::vector<ClientId>& bank_clients,
                               const AugmentConfig& config, ClientId self,
                               Stylize&& stylize) {
  AugmentedDataset out;
  out.entries.reserve(images.size() * config.k);
  for (std::size_t i = 0; i < images.size(); ++i) {
    Rng rng(config.seed, {self.value, 0, "augment", i});
    const auto draws =
        rng.sample_without_replacement(bank_clients.size(), config.k);
    for (std::size_t d : draws) {
      const ClientId source = bank_clients[d];
      AugmentedEntry entry{images[i], EntryOrigin::kOriginal, source};
      if (source != self) {
        entry.sample.image = stylize(images[i].image, source, rng);
        entry.origin = EntryOrigin::kStylized;
      }
      out.entries.push_back(std::move(entry));
    }
  }
  return out;
}

}  // namespace

const char* to_string(TransferBackend backend) {
  return backend == TransferBackend::kFft ? "fft" : "adain";
}

TransferBackend parse_backend(const std::string& text) {
  if (text == "adain") return TransferBackend::kAdain;
  if (text == "fft") return TransferBackend::kFft;
  throw InvalidArgument("backend must be 'adain' or 'fft', got '" + text + "'");
}

std::size_t AugmentedDataset::original_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.origin == EntryOrigin::kOriginal;
  return n;
}

std::vector<LabeledImage> AugmentedDataset::samples() const {
  std::vector<LabeledImage> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.sample);
  return out;
}

AugmentedDataset augment_client(std::span<const LabeledImage> images,
                                const GlobalStyleBank& bank,
                                const AugmentConfig& config, ClientId self,
                                const FeatureSpace& space) {
  if (config.backend != TransferBackend::kAdain) {
    throw InvalidArgument("augment: style bank given for a non-AdaIN backend");
  }
  if (bank.mode() != config.mode) {
    throw InvalidArgument(std::string("augment: bank mode is ") +
                          to_string(bank.mode()) + ", config asks for " +
                          to_string(config.mode));
  }
  if (!bank.contains(self)) {
    throw InvalidArgument("augment: client " + std::to_string(self.value) +
                          " is not in the style bank");
  }
  const std::vector<ClientId> clients = bank.clients();
  check_k(config.k, clients.size());
  return run_algorithm(
      images, clients, config, self,
      [&](const ImageTensor& img, ClientId source, Rng& rng) {
        const auto& styles = bank.at(source).styles;
        const StyleVector& style =
            config.mode == StyleKind::kOverall
                ? styles.front()
                : styles[static_cast<std::size_t>(rng.below(styles.size()))];
        return generate(img, style, space);
      });
}

AugmentedDataset augment_client(std::span<const LabeledImage> images,
                                const AmplitudeBank& bank,
                                const AugmentConfig& config, ClientId self) {
  if (config.backend != TransferBackend::kFft) {
    throw InvalidArgument("augment: amplitude bank given for a non-FFT backend");
  }
  if (bank.mode != config.mode) {
    throw InvalidArgument("augment: amplitude bank mode mismatch");
  }
  if (!bank.contains(self)) {
    throw InvalidArgument("augment: client " + std::to_string(self.value) +
                          " is not in the amplitude bank");
  }
  const std::vector<ClientId> clients = bank.clients();
  check_k(config.k, clients.size());
  return run_algorithm(
      images, clients, config, self,
      [&](const ImageTensor& img, ClientId source, Rng& rng) {
        const auto& spectra = bank.entries.at(source);
        const AmplitudeSpectrum& target =
            config.mode == StyleKind::kOverall
                ? spectra.front()
                : spectra[static_cast<std::size_t>(rng.below(spectra.size()))];
        return fft_amplitude_exchange(img, target, config.fft_window);
      });
}

AugmentedDataset passthrough(std::span<const LabeledImage> images) {
  AugmentedDataset out;
  out.entries.reserve(images.size());
  for (const auto& img : images) {
    out.entries.push_back({img, EntryOrigin::kOriginal, img.domain});
  }
  return out;
}

std::vector<SweepCell> sweep_grid(std::span<const LabeledImage> images,
                                  const GlobalStyleBank& single_bank,
                                  const GlobalStyleBank& overall_bank,
                                  const AugmentConfig& base, ClientId self,
                                  const FeatureSpace& space) {
  if (single_bank.clients() != overall_bank.clients()) {
    throw InvalidArgument("sweep_grid: banks cover different clients");
  }
  const std::size_t n = single_bank.clients().size();
  std::vector<SweepCell> cells;
  for (StyleKind mode : {StyleKind::kSingle, StyleKind::kOverall}) {
    const GlobalStyleBank& bank =
        mode == StyleKind::kSingle ? single_bank : overall_bank;
    for (std::size_t k = 1; k <= n; ++k) {
      AugmentConfig cfg = base;
      cfg.mode = mode;
      cfg.k = k;
      cells.push_back({mode, k, augment_client(images, bank, cfg, self, space)});
    }
  }
  return cells;
}

void write_augmented(const std::filesystem::path& dir,
                     const AugmentedDataset& data) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> manifest;
  manifest.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = data.entries[i];
    char name[32];
    std::snprintf(name, sizeof(name), "aug_%06zu.cct", i);
    save_tensor(dir / name, e.sample.image);
    manifest.push_back(
        {name,
         e.sample.label,
         e.sample.domain.value,
         {e.origin == EntryOrigin::kOriginal ? "original" : "stylized",
          std::to_string(e.style_source.value), std::to_string(e.sample.id)}});
  }
  write_text_file(dir / "manifest.tsv", format_manifest(manifest));
}

}  // namespace ccst
