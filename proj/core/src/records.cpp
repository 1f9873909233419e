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

#include "certkit/records.hpp"

#include <algorithm>
#include <cmath>

#include "certkit/error.hpp"
#include "certkit/timestamp.hpp"

namespace certkit {
namespace {

constexpr std::string_view kImageMetaType = "certkit.image-meta.v1";
constexpr std::string_view kAnnotationType = "certkit.annotation.v1";
constexpr std::string_view kDatasetType = "certkit.dataset.v1";

constexpr std::string_view kTimesOfDay[] = {"day", "night", "dawn", "dusk"};

void invalid(std::string_view what, const std::string& message) {
  fail(ErrorCode::kInvalidArgument, std::string(what) + ": " + message);
}

void check_type(const Json& json, std::string_view expected) {
  const auto& type = json_string(require_field(json, "type", expected), "type");
  if (type != expected) {
    invalid(expected, "unexpected object type '" + type + "'");
  }
}

Digest digest_field(const Json& json, std::string_view key,
                    std::string_view what) {
  return Digest::from_string(json_string(require_field(json, key, what), key));
}

std::optional<Digest> optional_digest(const Json& json, std::string_view key) {
  if (const Json* v = optional_field(json, key)) {
    return Digest::from_string(json_string(*v, key));
  }
  return std::nullopt;
}

}  // namespace

std::string_view role_name(DatasetRole role) {
  switch (role) {
    case DatasetRole::kDevelopmentTrain:
      return "development-train";
    case DatasetRole::kDevelopmentValidation:
      return "development-validation";
    case DatasetRole::kCertification:
      return "certification";
  }
  return "unknown";
}

DatasetRole role_from_name(std::string_view name) {
  for (auto role : {DatasetRole::kDevelopmentTrain,
                    DatasetRole::kDevelopmentValidation,
                    DatasetRole::kCertification}) {
    if (role_name(role) == name) return role;
  }
  fail(ErrorCode::kInvalidArgument,
       "unknown dataset role '" + std::string(name) +
           "' (expected development-train, development-validation or "
           "certification)");
}

void validate_image_info(const ImageInfo& info) {
  if (info.width <= 0 || info.height <= 0) {
    invalid("image", "width and height must be positive");
  }
  if (!is_utc_timestamp(info.capture_time)) {
    invalid("image", "capture_time '" + info.capture_time +
                         "' is not a UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)");
  }
  if (info.camera_id.empty()) invalid("image", "camera_id is required");
  if (info.flight_id.empty()) invalid("image", "flight_id is required");
  if (info.frame_index.has_value() != info.sequence_id.has_value()) {
    invalid("image", "frame_index and sequence_id must be given together");
  }
  if (info.sequence_id && info.sequence_id->empty()) {
    invalid("image", "sequence_id must not be empty");
  }
  if (info.frame_index && *info.frame_index < 0) {
    invalid("image", "frame_index must be non-negative");
  }
  if (const auto& pose = info.ownship_pose) {
    for (double v : {pose->latitude_deg, pose->longitude_deg, pose->altitude_m,
                     pose->heading_deg, pose->pitch_deg, pose->roll_deg}) {
      if (!std::isfinite(v)) invalid("image", "ownship pose must be finite");
    }
    if (std::abs(pose->latitude_deg) > 90.0 ||
        std::abs(pose->longitude_deg) > 180.0) {
      invalid("image", "ownship latitude/longitude out of range");
    }
  }
}

void validate_attributes(const Attributes& attributes, std::string_view what) {
  for (const auto& [key, value] : attributes) {
    if (key.empty()) invalid(what, "attribute names must not be empty");
    if (const double* num = std::get_if<double>(&value)) {
      if (!std::isfinite(*num)) invalid(what, "attribute '" + key + "' is not finite");
    }
    if (key == kIntruderRange) {
      const double* range = std::get_if<double>(&value);
      if (range == nullptr || *range < 0.0) {
        invalid(what, "intruder_range_m must be a non-negative number");
      }
    } else if (key == kTimeOfDay) {
      const std::string* tod = std::get_if<std::string>(&value);
      if (tod == nullptr ||
          std::find(std::begin(kTimesOfDay), std::end(kTimesOfDay), *tod) ==
              std::end(kTimesOfDay)) {
        invalid(what, "time_of_day must be one of day, night, dawn, dusk");
      }
    } else if (key == kCallsign || key == kWeather || key == kLighting ||
               key == kBackground) {
      if (!std::holds_alternative<std::string>(value)) {
        invalid(what, "attribute '" + key + "' must be a string");
      }
    }
  }
}

void validate_box(const BoundingBox& box, std::int64_t image_width,
                  std::int64_t image_height) {
  const auto& g = box.geometry;
  for (double v : {g.x, g.y, g.w, g.h}) {
    if (!std::isfinite(v)) invalid("box", "coordinates must be finite");
  }
  if (g.w <= 0.0 || g.h <= 0.0) invalid("box", "width and height must be positive");
  if (g.x < 0.0 || g.y < 0.0) invalid("box", "x and y must be non-negative");
  if (g.x + g.w > static_cast<double>(image_width) ||
      g.y + g.h > static_cast<double>(image_height)) {
    invalid("box", "box (" + format_decimal(g.x) + "," + format_decimal(g.y) +
                       "," + format_decimal(g.w) + "," + format_decimal(g.h) +
                       ") exceeds image bounds " + std::to_string(image_width) +
                       "x" + std::to_string(image_height));
  }
  if (box.class_label.empty()) invalid("box", "class label is required");
  validate_attributes(box.attributes, "box");
}

const AttributeValue* find_attribute(const Attributes& attributes,
                                     std::string_view key) {
  auto it = attributes.find(key);
  return it == attributes.end() ? nullptr : &it->second;
}

Json attributes_to_json(const Attributes& attributes) {
  Json out = Json::object();
  for (const auto& [key, value] : attributes) {
    if (const double* num = std::get_if<double>(&value)) {
      out[key] = Json{{"num", format_decimal(*num)}};
    } else {
      out[key] = std::get<std::string>(value);
    }
  }
  return out;
}

Attributes attributes_from_json(const Json& json, std::string_view what) {
  Attributes out;
  if (json.is_null()) return out;
  if (!json.is_object()) invalid(what, "attributes must be an object");
  for (const auto& [key, value] : json.items()) {
    if (value.is_string()) {
      out.emplace(key, value.get<std::string>());
    } else if (value.is_number()) {
      out.emplace(key, json_real(value, key));
    } else if (value.is_object() && value.size() == 1 && value.contains("num")) {
      out.emplace(key, parse_decimal(json_string(value["num"], key)));
    } else {
      invalid(what, "attribute '" + key + "' must be a string or number");
    }
  }
  return out;
}

Json box_to_json(const BoundingBox& box) {
  return Json{
      {"x", format_decimal(box.geometry.x)},
      {"y", format_decimal(box.geometry.y)},
      {"w", format_decimal(box.geometry.w)},
      {"h", format_decimal(box.geometry.h)},
      {"class", box.class_label},
      {"source", box.source == BoxSource::kAuto ? "auto" : "manual"},
      {"attributes", attributes_to_json(box.attributes)},
  };
}

BoundingBox box_from_json(const Json& json, std::string_view what) {
  BoundingBox box;
  box.geometry.x = json_real(require_field(json, "x", what), "x");
  box.geometry.y = json_real(require_field(json, "y", what), "y");
  box.geometry.w = json_real(require_field(json, "w", what), "w");
  box.geometry.h = json_real(require_field(json, "h", what), "h");
  box.class_label = json_string(require_field(json, "class", what), "class");
  if (const Json* src = optional_field(json, "source")) {
    const auto& s = json_string(*src, "source");
    if (s == "auto") {
      box.source = BoxSource::kAuto;
    } else if (s == "manual") {
      box.source = BoxSource::kManual;
    } else {
      invalid(what, "box source must be 'auto' or 'manual'");
    }
  }
  if (const Json* attrs = optional_field(json, "attributes")) {
    box.attributes = attributes_from_json(*attrs, what);
  }
  return box;
}

Json image_meta_to_json(const ImageMeta& meta) {
  const ImageInfo& info = meta.info;
  Json out{
      {"type", kImageMetaType},
      {"image", meta.image_digest.str()},
      {"width", info.width},
      {"height", info.height},
      {"capture_time", info.capture_time},
      {"camera_id", info.camera_id},
      {"flight_id", info.flight_id},
  };
  if (info.sequence_id) out["sequence_id"] = *info.sequence_id;
  if (info.frame_index) out["frame_index"] = *info.frame_index;
  if (const auto& p = info.ownship_pose) {
    out["ownship_pose"] = Json{
        {"latitude_deg", format_decimal(p->latitude_deg)},
        {"longitude_deg", format_decimal(p->longitude_deg)},
        {"altitude_m", format_decimal(p->altitude_m)},
        {"heading_deg", format_decimal(p->heading_deg)},
        {"pitch_deg", format_decimal(p->pitch_deg)},
        {"roll_deg", format_decimal(p->roll_deg)},
    };
  }
  return out;
}

ImageInfo image_info_from_json(const Json& json, std::string_view what) {
  ImageInfo info;
  if (const Json* v = optional_field(json, "width")) info.width = json_int(*v, "width");
  if (const Json* v = optional_field(json, "height")) info.height = json_int(*v, "height");
  info.capture_time =
      json_string(require_field(json, "capture_time", what), "capture_time");
  info.camera_id = json_string(require_field(json, "camera_id", what), "camera_id");
  info.flight_id = json_string(require_field(json, "flight_id", what), "flight_id");
  if (const Json* v = optional_field(json, "sequence_id")) {
    info.sequence_id = json_string(*v, "sequence_id");
  }
  if (const Json* v = optional_field(json, "frame_index")) {
    info.frame_index = json_int(*v, "frame_index");
  }
  if (const Json* p = optional_field(json, "ownship_pose")) {
    OwnshipPose pose;
    pose.latitude_deg = json_real(require_field(*p, "latitude_deg", what), "latitude_deg");
    pose.longitude_deg = json_real(require_field(*p, "longitude_deg", what), "longitude_deg");
    pose.altitude_m = json_real(require_field(*p, "altitude_m", what), "altitude_m");
    pose.heading_deg = json_real(require_field(*p, "heading_deg", what), "heading_deg");
    pose.pitch_deg = json_real(require_field(*p, "pitch_deg", what), "pitch_deg");
    pose.roll_deg = json_real(require_field(*p, "roll_deg", what), "roll_deg");
    info.ownship_pose = pose;
  }
  return info;
}

ImageMeta image_meta_from_json(const Json& json) {
  check_type(json, kImageMetaType);
  return ImageMeta{digest_field(json, "image", "image meta"),
                   image_info_from_json(json, "image meta")};
}

Json annotation_to_json(const AnnotationRecord& record) {
  Json boxes = Json::array();
  for (const auto& box : record.boxes) boxes.push_back(box_to_json(box));
  Json out{
      {"type", kAnnotationType},
      {"image", record.image_digest.str()},
      {"boxes", std::move(boxes)},
      {"attributes", attributes_to_json(record.attributes)},
      {"author", record.author},
      {"created_at", record.created_at},
  };
  if (record.parent) out["parent"] = record.parent->str();
  return out;
}

AnnotationRecord annotation_from_json(const Json& json) {
  check_type(json, kAnnotationType);
  AnnotationRecord record{digest_field(json, "image", "annotation"),
                          optional_digest(json, "parent"),
                          {},
                          {},
                          json_string(require_field(json, "author", "annotation"), "author"),
                          json_string(require_field(json, "created_at", "annotation"),
                                      "created_at")};
  for (const auto& box : require_field(json, "boxes", "annotation")) {
    record.boxes.push_back(box_from_json(box, "annotation box"));
  }
  if (const Json* attrs = optional_field(json, "attributes")) {
    record.attributes = attributes_from_json(*attrs, "annotation");
  }
  return record;
}

Json dataset_to_json(const DatasetManifest& manifest) {
  Json entries = Json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back(
        Json{{"image", e.image_digest.str()}, {"annotation", e.annotation_id.str()}});
  }
  Json out{
      {"type", kDatasetType},
      {"name", manifest.name},
      {"version", manifest.version},
      {"role", role_name(manifest.role)},
      {"entries", std::move(entries)},
  };
  if (manifest.parent) out["parent"] = manifest.parent->str();
  return out;
}

DatasetManifest dataset_from_json(const Json& json, const Digest& dataset_id) {
  check_type(json, kDatasetType);
  DatasetManifest m{dataset_id,
                    json_string(require_field(json, "name", "dataset"), "name"),
                    json_int(require_field(json, "version", "dataset"), "version"),
                    optional_digest(json, "parent"),
                    role_from_name(json_string(require_field(json, "role", "dataset"), "role")),
                    {}};
  for (const auto& e : require_field(json, "entries", "dataset")) {
    m.entries.push_back(DatasetEntry{digest_field(e, "image", "dataset entry"),
                                     digest_field(e, "annotation", "dataset entry")});
  }
  return m;
}

}  // namespace certkit
