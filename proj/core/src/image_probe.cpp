// Copyright 2026 The certkit Authors.
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

#include "certkit/image_probe.hpp"

#include <cctype>
#include <cstdlib>
#include <string>

namespace certkit {
namespace {

std::uint32_t be32(std::string_view b, std::size_t at) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3]));
}

std::uint32_t be16(std::string_view b, std::size_t at) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1]));
}

std::uint32_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8);
}

std::int32_t le32s(std::string_view b, std::size_t at) {
  return static_cast<std::int32_t>(le16(b, at) | (le16(b, at + 2) << 16));
}

std::optional<ImageSize> make(std::int64_t w, std::int64_t h) {
  if (w <= 0 || h <= 0) return std::nullopt;
  return ImageSize{w, h};
}

std::optional<ImageSize> probe_png(std::string_view b) {
  // Signature, then the IHDR chunk must come first.
  if (b.size() < 24 || b.substr(12, 4) != "IHDR") return std::nullopt;
  return make(be32(b, 16), be32(b, 20));
}

std::optional<ImageSize> probe_jpeg(std::string_view b) {
  std::size_t pos = 2;
  while (pos + 4 <= b.size()) {
    if (static_cast<unsigned char>(b[pos]) != 0xFF) return std::nullopt;
    const auto marker = static_cast<unsigned char>(b[pos + 1]);
    if (marker == 0xFF) {  // fill byte
      ++pos;
      continue;
    }
    if (marker == 0xD8 || marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
      pos += 2;
      continue;
    }
    const std::uint32_t len = be16(b, pos + 2);
    if (len < 2) return std::nullopt;
    const bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 &&
                     marker != 0xC8 && marker != 0xCC;
    if (sof) {
      if (pos + 9 > b.size()) return std::nullopt;
      return make(be16(b, pos + 7), be16(b, pos + 5));
    }
    if (marker == 0xD9 || marker == 0xDA) return std::nullopt;
    pos += 2 + len;
  }
  return std::nullopt;
}

std::optional<ImageSize> probe_netpbm(std::string_view b) {
  // P1..P6 followed by whitespace/comment separated width and height.
  std::size_t pos = 2;
  std::int64_t values[2] = {0, 0};
  for (auto& value : values) {
    for (;;) {
      if (pos >= b.size()) return std::nullopt;
      if (b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(b[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos]))) {
      if (pos - start > 9) return std::nullopt;
      value = value * 10 + (b[pos] - '0');
      ++pos;
    }
    if (pos == start) return std::nullopt;
  }
  return make(values[0], values[1]);
}

}  // namespace

std::optional<ImageSize> probe_image_size(std::string_view b) {
  if (b.size() >= 8 && b.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8)) {
    return probe_png(b);
  }
  if (b.size() >= 4 && static_cast<unsigned char>(b[0]) == 0xFF &&
      static_cast<unsigned char>(b[1]) == 0xD8) {
    return probe_jpeg(b);
  }
  if (b.size() >= 10 && (b.substr(0, 6) == "GIF87a" || b.substr(0, 6) == "GIF89a")) {
    return make(le16(b, 6), le16(b, 8));
  }
  if (b.size() >= 26 && b.substr(0, 2) == "BM") {
    return make(std::abs(static_cast<std::int64_t>(le32s(b, 18))),
                std::abs(static_cast<std::int64_t>(le32s(b, 22))));
  }
  if (b.size() >= 3 && b[0] == 'P' && b[1] >= '1' && b[1] <= '6' &&
      std::isspace(static_cast<unsigned char>(b[2]))) {
    return probe_netpbm(b);
  }
  return std::nullopt;
}

}  // namespace certkit
