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

#ifndef CERTKIT_TESTS_FIXTURES_HPP_
#define CERTKIT_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "certkit/repository.hpp"

namespace certkit::testing {

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "certkit-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) std::abort();
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Binary PGM whose pixels are derived from tag, so distinct tags give
// distinct digests.
inline std::string pgm(std::uint32_t tag, int width = 32, int height = 24) {
  std::string bytes =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::uint32_t x = tag * 2654435761u + 1u;
  for (int i = 0; i < width * height; ++i) {
    x ^= x << 13;
    x ^= x >> 17;
    x ^= x << 5;
    bytes += static_cast<char>(x & 0xFF);
  }
  return bytes;
}

inline ImageInfo image_info(const std::string& flight_id, const std::string& camera_id = "cam-0") {
  ImageInfo info;
  info.capture_time = "2026-03-01T12:00:00Z";
  info.camera_id = camera_id;
  info.flight_id = flight_id;
  return info;
}

inline BoundingBox box(double x, double y, double w, double h,
                       const std::string& class_label = "aircraft") {
  return BoundingBox{BoxGeometry{x, y, w, h}, class_label, BoxSource::kManual, {}};
}

// In-memory dataset entry; digests are derived from tag and never stored.
inline ResolvedEntry entry(std::uint32_t tag, std::vector<BoundingBox> boxes,
                           Attributes attributes = {}, ImageInfo info = image_info("F0")) {
  const Digest image = Digest::of("image-" + std::to_string(tag));
  if (info.width == 0) info.width = 640;
  if (info.height == 0) info.height = 480;
  AnnotationRecord record{image, std::nullopt, std::move(boxes), std::move(attributes), "tester",
                          "2026-03-02T00:00:00Z"};
  return ResolvedEntry{ImageMeta{image, info}, Digest::of("annotation-" + std::to_string(tag)),
                       std::move(record)};
}

inline ResolvedDataset dataset(std::vector<ResolvedEntry> entries,
                               DatasetRole role = DatasetRole::kCertification) {
  ResolvedDataset out{DatasetManifest{Digest::of("dataset"), "fixture", 1, std::nullopt, role, {}},
                      std::move(entries)};
  for (const auto& e : out.entries) {
    out.manifest.entries.push_back(DatasetEntry{e.image.image_digest, e.annotation_id});
  }
  return out;
}

inline BoundingBox ranged_box(double range, double x = 10, double y = 10, double w = 20,
                              double h = 10, const std::string& class_label = "aircraft") {
  BoundingBox b = box(x, y, w, h, class_label);
  b.attributes.emplace(std::string(kIntruderRange), range);
  return b;
}

}  // namespace certkit::testing

#endif  // CERTKIT_TESTS_FIXTURES_HPP_
