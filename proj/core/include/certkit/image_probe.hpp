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
#ifndef CERTKIT_IMAGE_PROBE_HPP_
#define CERTKIT_IMAGE_PROBE_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

namespace certkit {

struct ImageSize {
  std::int64_t width = 0;
  std::int64_t height = 0;
};

// Reads pixel dimensions from the container header only. Recognizes PNG,
// JPEG (baseline and progressive SOF markers), GIF, BMP and binary/ASCII
// netpbm (PBM/PGM/PPM). Returns nullopt for anything else.
std::optional<ImageSize> probe_image_size(std::string_view bytes);

}  // namespace certkit

#endif  // CERTKIT_IMAGE_PROBE_HPP_
