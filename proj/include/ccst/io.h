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
#ifndef CCST_IO_H_
#define CCST_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccst/tensor.h"

namespace ccst {

using Bytes = std::vector<std::uint8_t>;

/// Appends little-endian scalars to a byte buffer.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { bytes_.push_back(v); }
  void put_u16(std::uint16_t v);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_raw(std::string_view s);

  const Bytes& bytes() const { return bytes_; }
  Bytes take() { return std::move(bytes_); }

 private:
  Bytes bytes_;
};

/// Reads little-endian scalars; running off the end throws TruncationError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t get_u8();
  std::uint16_t get_u16();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  double get_f64();
  std::string get_raw(std::size_t n);
  void skip(std::size_t n);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// ".cct" tensor files: "CCT1", u16 channels, u32 height, u32 width, then
// channels*height*width little-endian f64 values.
Bytes encode_tensor(const ImageTensor& tensor);
ImageTensor decode_tensor(std::span<const std::uint8_t> bytes);
void save_tensor(const std::filesystem::path& path, const ImageTensor& tensor);
ImageTensor load_tensor(const std::filesystem::path& path);

/// One line of a dataset manifest: path<TAB>label<TAB>domain[<TAB>extra...].
struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int label = 0;
  std::uint16_t domain = 0;
  std::vector<std::string> extra;

  bool operator==(const ManifestEntry&) const = default;
};

std::string format_manifest(std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace ccst

#endif  // CCST_IO_H_
