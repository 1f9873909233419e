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
#ifndef CERTKIT_RECORDS_HPP_
#define CERTKIT_RECORDS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "certkit/canonical_json.hpp"
#include "certkit/digest.hpp"

namespace certkit {

// Axis-aligned box in pixels: top-left corner plus width and height.
struct BoxGeometry {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const BoxGeometry&, const BoxGeometry&) = default;
};

// Attribute values are either free text or real numbers. In canonical JSON a
// number is written as {"num": "<decimal>"} so that the two never collide.
using AttributeValue = std::variant<std::string, double>;
using Attributes = std::map<std::string, AttributeValue, std::less<>>;

// Reserved attribute keys with fixed types.
inline constexpr std::string_view kIntruderRange = "intruder_range_m";
inline constexpr std::string_view kCallsign = "callsign";
inline constexpr std::string_view kTimeOfDay = "time_of_day";
inline constexpr std::string_view kWeather = "weather";
inline constexpr std::string_view kLighting = "lighting";
inline constexpr std::string_view kBackground = "background";

enum class BoxSource { kAuto, kManual };

struct BoundingBox {
  BoxGeometry geometry;
  std::string class_label;
  BoxSource source = BoxSource::kManual;
  // Box-level attributes (range and callsign of this particular intruder).
  Attributes attributes;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct OwnshipPose {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;
  double heading_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;

  friend bool operator==(const OwnshipPose&, const OwnshipPose&) = default;
};

// Descriptive metadata for one captured image, before it has a digest.
struct ImageInfo {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::string capture_time;  // UTC, YYYY-MM-DDTHH:MM:SSZ
  std::string camera_id;
  std::string flight_id;
  std::optional<std::string> sequence_id;
  std::optional<std::int64_t> frame_index;
  std::optional<OwnshipPose> ownship_pose;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct ImageMeta {
  Digest image_digest;
  ImageInfo info;

  friend bool operator==(const ImageMeta&, const ImageMeta&) = default;
};

// Labels for one image. The annotation id is the digest of the canonical
// form, which includes the parent id, so parent chains cannot form cycles.
struct AnnotationRecord {
  Digest image_digest;
  std::optional<Digest> parent;
  std::vector<BoundingBox> boxes;
  Attributes attributes;
  std::string author;
  std::string created_at;

  friend bool operator==(const AnnotationRecord&,
                         const AnnotationRecord&) = default;
};

enum class DatasetRole { kDevelopmentTrain, kDevelopmentValidation, kCertification };

std::string_view role_name(DatasetRole role);
DatasetRole role_from_name(std::string_view name);

struct DatasetEntry {
  Digest image_digest;
  Digest annotation_id;

  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
  friend auto operator<=>(const DatasetEntry&, const DatasetEntry&) = default;
};

// What a caller supplies to commit a dataset version.
struct DatasetDraft {
  std::string name;
  std::optional<Digest> parent;
  DatasetRole role = DatasetRole::kDevelopmentTrain;
  std::vector<DatasetEntry> entries;
};

struct DatasetManifest {
  Digest dataset_id;
  std::string name;
  std::int64_t version = 1;
  std::optional<Digest> parent;
  DatasetRole role = DatasetRole::kDevelopmentTrain;
  std::vector<DatasetEntry> entries;  // sorted by image digest

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

// Validation (throws Error(kInvalidArgument) naming the problem).
void validate_image_info(const ImageInfo& info);
void validate_box(const BoundingBox& box, std::int64_t image_width,
                  std::int64_t image_height);
void validate_attributes(const Attributes& attributes, std::string_view what);

// Canonical JSON forms. The *_from_json functions accept both the canonical
// encoding and hand-written inputs where numbers appear as JSON numbers.
Json attributes_to_json(const Attributes& attributes);
Attributes attributes_from_json(const Json& json, std::string_view what);

Json box_to_json(const BoundingBox& box);
BoundingBox box_from_json(const Json& json, std::string_view what);

Json image_meta_to_json(const ImageMeta& meta);
ImageMeta image_meta_from_json(const Json& json);
ImageInfo image_info_from_json(const Json& json, std::string_view what);

Json annotation_to_json(const AnnotationRecord& record);
AnnotationRecord annotation_from_json(const Json& json);

// Excludes dataset_id, which is the digest of this form.
Json dataset_to_json(const DatasetManifest& manifest);
DatasetManifest dataset_from_json(const Json& json, const Digest& dataset_id);

// nullptr when the key is absent.
const AttributeValue* find_attribute(const Attributes& attributes,
                                     std::string_view key);

}  // namespace certkit

#endif  // CERTKIT_RECORDS_HPP_
