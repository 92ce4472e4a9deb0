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
#include "ccst/io.h"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ccst/errors.h"

namespace ccst {
namespace {

constexpr std::string_view kTensorMagic = "CCT1";

template <typename T>
void put_le(Bytes& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

int parse_int(std::string_view field, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("manifest line " + std::to_string(line_no) +
                      ": expected integer, got '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

void ByteWriter::put_u16(std::uint16_t v) { put_le(bytes_, v); }
void ByteWriter::put_u32(std::uint32_t v) { put_le(bytes_, v); }
void ByteWriter::put_u64(std::uint64_t v) { put_le(bytes_, v); }
void ByteWriter::put_f64(double v) {
  put_le(bytes_, std::bit_cast<std::uint64_t>(v));
}
void ByteWriter::put_raw(std::string_view s) {
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw TruncationError("unexpected end of data at byte " +
                          std::to_string(pos_) + " (needed " +
                          std::to_string(n) + " more)");
  }
}

std::uint8_t ByteReader::get_u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint16_t ByteReader::get_u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                               (bytes_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::get_u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string ByteReader::get_raw(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

void ByteReader::skip(std::size_t n) {
  need(n);
  pos_ += n;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n =
        std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

Bytes encode_tensor(const ImageTensor& tensor) {
  if (tensor.channels() > std::numeric_limits<std::uint16_t>::max() ||
      tensor.height() > std::numeric_limits<std::uint32_t>::max() ||
      tensor.width() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("encode_tensor: shape exceeds format limits");
  }
  ByteWriter w;
  w.put_raw(kTensorMagic);
  w.put_u16(static_cast<std::uint16_t>(tensor.channels()));
  w.put_u32(static_cast<std::uint32_t>(tensor.height()));
  w.put_u32(static_cast<std::uint32_t>(tensor.width()));
  for (double v : tensor.data()) w.put_f64(v);
  return w.take();
}

ImageTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.get_raw(kTensorMagic.size()) != kTensorMagic) {
    throw FormatError("not a .cct tensor (bad magic)");
  }
  const std::uint64_t channels = r.get_u16();
  const std::uint64_t height = r.get_u32();
  const std::uint64_t width = r.get_u32();
  if (channels == 0 || height == 0 || width == 0) {
    throw DimensionError("tensor has a zero dimension");
  }
  // u16 * u32 * u32 * 8 can overflow 64 bits.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (height > kMax / width || height * width > kMax / 8 / channels) {
    throw DimensionError("tensor dimensions overflow");
  }
  const std::uint64_t max_values = r.remaining() / 8;
  const std::uint64_t count = channels * height * width;
  if (count > max_values) {
    throw TruncationError("tensor payload truncated: expected " +
                          std::to_string(count * 8) + " bytes, have " +
                          std::to_string(r.remaining()));
  }
  std::vector<double> data(count);
  for (auto& v : data) v = r.get_f64();
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes after tensor payload");
  }
  try {
    return ImageTensor(channels, height, width, std::move(data));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid tensor payload: ") + e.what());
  }
}

void save_tensor(const std::filesystem::path& path, const ImageTensor& tensor) {
  write_file(path, encode_tensor(tensor));
}

ImageTensor load_tensor(const std::filesystem::path& path) {
  return decode_tensor(read_file(path));
}

std::string format_manifest(std::span<const ManifestEntry> entries) {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << e.path << '\t' << e.label << '\t' << e.domain;
    for (const auto& x : e.extra) out << '\t' << x;
    out << '\n';
  }
  return out.str();
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    while (true) {
      const std::size_t tab = line.find('\t');
      fields.push_back(line.substr(0, tab));
      if (tab == std::string_view::npos) break;
      line = line.substr(tab + 1);
    }
    if (fields.size() < 3) {
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": expected path<TAB>label<TAB>domain");
    }
    ManifestEntry e;
    e.path = std::string(fields[0]);
    e.label = parse_int(fields[1], line_no);
    const int domain = parse_int(fields[2], line_no);
    if (e.label < 0 || domain < 0 ||
        domain > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": label/domain out of range");
    }
    e.domain = static_cast<std::uint16_t>(domain);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      e.extra.emplace_back(fields[i]);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return parse_manifest(
      std::string_view(reinterpret_cast<const char*>(bytes.data()),
                       bytes.size()));
}

}  // namespace ccst
