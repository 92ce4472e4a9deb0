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
#include "ccst/bank.h"

#include <limits>
#include <string>

#include "ccst/errors.h"

namespace ccst {
namespace {

std::vector<std::size_t> pick_images(std::size_t available,
                                     const PublishOptions& options, Rng& rng) {
  if (available == 0) throw InvalidArgument("publish: client has no images");
  if (options.mode == StyleKind::kSingle) {
    if (options.styles_per_client == 0) {
      throw InvalidArgument("publish: J must be at least 1");
    }
    if (options.styles_per_client > available) {
      throw InvalidArgument("publish: J=" +
                            std::to_string(options.styles_per_client) +
                            " exceeds the client's " +
                            std::to_string(available) + " images");
    }
    return rng.sample_without_replacement(available,
                                          options.styles_per_client);
  }
  if (options.overall_sample && *options.overall_sample < available) {
    if (*options.overall_sample == 0) {
      throw InvalidArgument("publish: overall sample must be positive");
    }
    return rng.sample_without_replacement(available, *options.overall_sample);
  }
  std::vector<std::size_t> all(available);
  for (std::size_t i = 0; i < available; ++i) all[i] = i;
  return all;
}

}  // namespace

GlobalStyleBank::GlobalStyleBank(StyleKind mode, std::size_t channels,
                                 std::map<ClientId, LocalStyleBank> entries)
    : mode_(mode), channels_(channels), entries_(std::move(entries)) {}

std::vector<ClientId> GlobalStyleBank::clients() const {
  std::vector<ClientId> ids;
  for (const auto& [id, _] : entries_) ids.push_back(id);
  return ids;
}

const LocalStyleBank& GlobalStyleBank::at(ClientId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw InvalidArgument("style bank has no client " +
                          std::to_string(id.value));
  }
  return it->second;
}

std::size_t GlobalStyleBank::style_count() const {
  std::size_t n = 0;
  for (const auto& [_, local] : entries_) n += local.styles.size();
  return n;
}

LocalStyleBank publish_styles(ClientId client,
                              std::span<const ImageTensor> images,
                              const PublishOptions& options,
                              const FeatureSpace& space, Rng& rng) {
  const std::vector<std::size_t> picked =
      pick_images(images.size(), options, rng);
  LocalStyleBank local{client, {}};
  if (options.mode == StyleKind::kSingle) {
    for (std::size_t idx : picked) {
      StyleVector s = extract_style(images[idx], space);
      s.image_index = static_cast<std::uint32_t>(idx);
      local.styles.push_back(std::move(s));
    }
  } else {
    std::vector<ImageTensor> pool;
    pool.reserve(picked.size());
    for (std::size_t idx : picked) pool.push_back(images[idx]);
    local.styles.push_back(extract_overall_style(pool, space));
  }
  return local;
}

GlobalStyleBank assemble_bank(std::span<const LocalStyleBank> locals) {
  if (locals.empty()) throw InvalidArgument("assemble_bank: no client banks");
  if (locals.front().styles.empty()) {
    throw InvalidArgument("assemble_bank: empty local bank");
  }
  const StyleKind mode = locals.front().kind();
  const std::size_t channels = locals.front().styles.front().channels();
  std::map<ClientId, LocalStyleBank> entries;
  for (const auto& local : locals) {
    if (local.styles.empty()) {
      throw InvalidArgument("assemble_bank: client " +
                            std::to_string(local.client.value) +
                            " uploaded no styles");
    }
    for (const auto& s : local.styles) {
      if (s.kind != mode) {
        throw InvalidArgument("assemble_bank: mixed style modes");
      }
      if (s.mu.size() != channels || s.sigma.size() != channels) {
        throw InvalidArgument("assemble_bank: mixed channel counts");
      }
    }
    if (!entries.emplace(local.client, local).second) {
      throw InvalidArgument("assemble_bank: duplicate client " +
                            std::to_string(local.client.value));
    }
  }
  return GlobalStyleBank(mode, channels, std::move(entries));
}

std::size_t encoded_bank_size(std::size_t channels,
                              std::span<const std::size_t> styles_per_client) {
  std::size_t size = kBankHeaderBytes + kBankTrailerBytes;
  for (std::size_t count : styles_per_client) {
    size += kBankEntryHeaderBytes + count * 2 * channels * sizeof(double);
  }
  return size;
}

Bytes encode_bank(const GlobalStyleBank& bank) {
  constexpr auto kU16Max = std::numeric_limits<std::uint16_t>::max();
  if (bank.entries().size() > kU16Max || bank.channels() > kU16Max) {
    throw InvalidArgument("encode_bank: bank exceeds format limits");
  }
  ByteWriter w;
  w.put_raw("CCSB");
  w.put_u8(kBankFormatVersion);
  w.put_u8(static_cast<std::uint8_t>(bank.mode()));
  w.put_u16(static_cast<std::uint16_t>(bank.entries().size()));
  w.put_u16(static_cast<std::uint16_t>(bank.channels()));
  for (const auto& [id, local] : bank.entries()) {
    if (local.styles.size() > kU16Max) {
      throw InvalidArgument("encode_bank: too many styles for one client");
    }
    w.put_u16(id.value);
    w.put_u16(static_cast<std::uint16_t>(local.styles.size()));
    for (const auto& s : local.styles) {
      for (double v : s.mu) w.put_f64(v);
      for (double v : s.sigma) w.put_f64(v);
    }
  }
  const std::uint32_t crc = crc32(w.bytes());
  w.put_u32(crc);
  return w.take();
}

GlobalStyleBank decode_bank(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.get_raw(4) != "CCSB") throw FormatError("not a style bank (bad magic)");
  const std::uint8_t version = r.get_u8();
  if (version != kBankFormatVersion) {
    throw VersionError("style bank version " + std::to_string(version) +
                       " is not supported (expected " +
                       std::to_string(kBankFormatVersion) + ")");
  }
  const std::uint8_t mode_byte = r.get_u8();
  if (mode_byte > 1) {
    throw FormatError("style bank has unknown mode " +
                      std::to_string(mode_byte));
  }
  const auto mode = static_cast<StyleKind>(mode_byte);
  const std::size_t client_count = r.get_u16();
  const std::size_t channels = r.get_u16();

  // Walk the structure once to find the expected length, so truncation and
  // corruption are reported as what they are.
  std::vector<std::size_t> counts;
  {
    ByteReader probe = r;
    for (std::size_t i = 0; i < client_count; ++i) {
      probe.get_u16();
      const std::size_t n = probe.get_u16();
      counts.push_back(n);
      probe.skip(n * 2 * channels * sizeof(double));
    }
    if (probe.remaining() < kBankTrailerBytes) {
      throw TruncationError("style bank is missing its checksum");
    }
    if (probe.remaining() > kBankTrailerBytes) {
      throw FormatError("trailing bytes after style bank");
    }
  }
  const auto body = bytes.first(bytes.size() - kBankTrailerBytes);
  ByteReader trailer(bytes.last(kBankTrailerBytes));
  if (crc32(body) != trailer.get_u32()) {
    throw ChecksumError("style bank checksum mismatch");
  }

  std::map<ClientId, LocalStyleBank> entries;
  for (std::size_t i = 0; i < client_count; ++i) {
    LocalStyleBank local{ClientId{r.get_u16()}, {}};
    const std::size_t n = r.get_u16();
    if (n == 0) throw FormatError("style bank entry without styles");
    for (std::size_t k = 0; k < n; ++k) {
      StyleVector s;
      s.kind = mode;
      s.mu.resize(channels);
      s.sigma.resize(channels);
      for (double& v : s.mu) v = r.get_f64();
      for (double& v : s.sigma) v = r.get_f64();
      local.styles.push_back(std::move(s));
    }
    if (!entries.emplace(local.client, std::move(local)).second) {
      throw FormatError("style bank repeats a client id");
    }
  }
  return GlobalStyleBank(mode, channels, std::move(entries));
}

std::vector<ClientId> AmplitudeBank::clients() const {
  std::vector<ClientId> ids;
  for (const auto& [id, _] : entries) ids.push_back(id);
  return ids;
}

std::vector<AmplitudeSpectrum> publish_amplitudes(
    std::span<const ImageTensor> images, const PublishOptions& options,
    Rng& rng) {
  const std::vector<std::size_t> picked =
      pick_images(images.size(), options, rng);
  std::vector<AmplitudeSpectrum> out;
  if (options.mode == StyleKind::kSingle) {
    for (std::size_t idx : picked) out.push_back(amplitude(images[idx]));
  } else {
    std::vector<ImageTensor> pool;
    for (std::size_t idx : picked) pool.push_back(images[idx]);
    out.push_back(overall_amplitude(pool));
  }
  return out;
}

}  // namespace ccst
