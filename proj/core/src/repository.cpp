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

#include "certkit/repository.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "certkit/error.hpp"
#include "certkit/image_probe.hpp"
#include "certkit/timestamp.hpp"

namespace certkit {
namespace {

constexpr std::string_view kImagesRef = "images";
constexpr std::string_view kDatasetsRef = "datasets";

Json load_json(const ContentStore& store, const Digest& d, std::string_view what) {
  return parse_json(store.get(d), what);
}

bool valid_dataset_name(std::string_view name) {
  if (name.empty() || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

DatasetDiff diff_entries(std::span<const DatasetEntry> a,
                         std::span<const DatasetEntry> b) {
  std::map<Digest, Digest> left, right;
  for (const auto& e : a) left.emplace(e.image_digest, e.annotation_id);
  for (const auto& e : b) right.emplace(e.image_digest, e.annotation_id);
  DatasetDiff diff;
  for (const auto& [image, ann] : right) {
    auto it = left.find(image);
    if (it == left.end()) {
      diff.added.push_back(DatasetEntry{image, ann});
    } else if (it->second != ann) {
      diff.annotation_changed.push_back(AnnotationChange{image, it->second, ann});
    }
  }
  for (const auto& [image, ann] : left) {
    if (!right.contains(image)) diff.removed.push_back(image);
  }
  return diff;
}

std::vector<DatasetEntry> apply_diff(std::span<const DatasetEntry> a,
                                     const DatasetDiff& diff) {
  std::map<Digest, Digest> entries;
  for (const auto& e : a) entries.emplace(e.image_digest, e.annotation_id);
  for (const auto& image : diff.removed) entries.erase(image);
  for (const auto& change : diff.annotation_changed) {
    entries.insert_or_assign(change.image_digest, change.new_annotation);
  }
  for (const auto& e : diff.added) entries.insert_or_assign(e.image_digest, e.annotation_id);
  std::vector<DatasetEntry> out;
  for (const auto& [image, ann] : entries) out.push_back(DatasetEntry{image, ann});
  return out;
}

ImageMeta Repository::ingest_image(std::string_view bytes, ImageInfo info) {
  const auto size = probe_image_size(bytes);
  if (!size) {
    fail(ErrorCode::kInvalidArgument,
         "undecodable image: unsupported or corrupt container");
  }
  if ((info.width != 0 && info.width != size->width) ||
      (info.height != 0 && info.height != size->height)) {
    fail(ErrorCode::kInvalidArgument,
         "dimension mismatch: container is " + std::to_string(size->width) + "x" +
             std::to_string(size->height) + ", metadata says " +
             std::to_string(info.width) + "x" + std::to_string(info.height));
  }
  info.width = size->width;
  info.height = size->height;
  validate_image_info(info);

  ImageMeta meta{Digest::of(bytes), std::move(info)};
  const std::string meta_bytes = canonical_dump(image_meta_to_json(meta));
  const Digest meta_digest = Digest::of(meta_bytes);
  if (auto existing = store_.ref(kImagesRef, meta.image_digest.hex())) {
    if (*existing != meta_digest) {
      fail(ErrorCode::kConflict, "image " + meta.image_digest.str() +
                                     " was already ingested with different "
                                     "metadata; images are immutable");
    }
  }
  store_.put(bytes, ObjectKind::kImage);
  store_.put(meta_bytes, ObjectKind::kImageMeta);
  store_.set_ref(kImagesRef, meta.image_digest.hex(), meta_digest);
  return meta;
}

ImageMeta Repository::image_meta(const Digest& image_digest) const {
  auto meta_digest = store_.ref(kImagesRef, image_digest.hex());
  if (!meta_digest) {
    fail(ErrorCode::kNotFound, "unknown image " + image_digest.str());
  }
  ImageMeta meta = image_meta_from_json(load_json(store_, *meta_digest, "image meta"));
  if (meta.image_digest != image_digest) {
    fail(ErrorCode::kIntegrityViolation,
         "image index for " + image_digest.str() + " points at foreign metadata");
  }
  return meta;
}

void Repository::validate_annotation(const AnnotationRecord& record) const {
  const ImageMeta meta = image_meta(record.image_digest);
  if (record.author.empty()) {
    fail(ErrorCode::kInvalidArgument, "annotation: author is required");
  }
  if (!is_utc_timestamp(record.created_at)) {
    fail(ErrorCode::kInvalidArgument,
         "annotation: created_at '" + record.created_at + "' is not a UTC timestamp");
  }
  for (const auto& box : record.boxes) {
    validate_box(box, meta.info.width, meta.info.height);
  }
  validate_attributes(record.attributes, "annotation");
  if (record.parent) {
    const AnnotationRecord parent = annotation(*record.parent);
    if (parent.image_digest != record.image_digest) {
      fail(ErrorCode::kInvalidArgument,
           "annotation parent " + record.parent->str() +
               " refers to a different image");
    }
  }
}

Digest Repository::commit_annotation(const AnnotationRecord& record) {
  validate_annotation(record);
  return store_.put(canonical_dump(annotation_to_json(record)),
                    ObjectKind::kAnnotation);
}

AnnotationRecord Repository::annotation(const Digest& annotation_id) const {
  return annotation_from_json(load_json(store_, annotation_id, "annotation"));
}

std::vector<Digest> Repository::annotation_chain(const Digest& annotation_id) const {
  std::vector<Digest> chain{annotation_id};
  std::optional<Digest> next = annotation(annotation_id).parent;
  while (next) {
    chain.push_back(*next);
    next = annotation(*next).parent;
  }
  return chain;
}

DatasetManifest Repository::dataset_manifest(const Digest& dataset_id) const {
  return dataset_from_json(load_json(store_, dataset_id, "dataset"), dataset_id);
}

Digest Repository::commit_dataset(const DatasetDraft& draft) {
  if (!valid_dataset_name(draft.name)) {
    fail(ErrorCode::kInvalidArgument,
         "dataset name '" + draft.name + "' must be non-empty [A-Za-z0-9._-]");
  }
  DatasetManifest manifest{Digest::of(""), draft.name, 1, draft.parent,
                           draft.role, draft.entries};
  std::sort(manifest.entries.begin(), manifest.entries.end());
  for (std::size_t i = 1; i < manifest.entries.size(); ++i) {
    if (manifest.entries[i].image_digest == manifest.entries[i - 1].image_digest) {
      fail(ErrorCode::kInvalidArgument,
           "duplicate image " + manifest.entries[i].image_digest.str() +
               " in dataset");
    }
  }
  for (const auto& entry : manifest.entries) {
    if (!store_.contains(entry.annotation_id)) {
      fail(ErrorCode::kNotFound,
           "dangling reference: annotation " + entry.annotation_id.str());
    }
    const AnnotationRecord record = annotation(entry.annotation_id);
    if (record.image_digest != entry.image_digest) {
      fail(ErrorCode::kInvalidArgument,
           "annotation " + entry.annotation_id.str() + " references image " +
               record.image_digest.str() + ", not " + entry.image_digest.str());
    }
    image_meta(entry.image_digest);
  }
  if (draft.parent) {
    if (!store_.contains(*draft.parent)) {
      fail(ErrorCode::kNotFound, "dangling reference: parent dataset " +
                                     draft.parent->str());
    }
    const DatasetManifest parent = dataset_manifest(*draft.parent);
    if (parent.name != draft.name) {
      fail(ErrorCode::kInvalidArgument, "dataset name '" + draft.name +
                                            "' does not match parent name '" +
                                            parent.name + "'");
    }
    manifest.version = parent.version + 1;
  }
  const Digest id = store_.put(canonical_dump(dataset_to_json(manifest)),
                               ObjectKind::kDatasetManifest);
  const auto head = dataset_head(draft.name);
  if (!head || dataset_manifest(*head).version <= manifest.version) {
    store_.set_ref(kDatasetsRef, draft.name, id);
  }
  return id;
}

ResolvedDataset Repository::resolve_dataset(const Digest& dataset_id) const {
  ResolvedDataset resolved{dataset_manifest(dataset_id), {}};
  resolved.entries.reserve(resolved.manifest.entries.size());
  for (const auto& entry : resolved.manifest.entries) {
    ImageMeta meta = image_meta(entry.image_digest);
    store_.get(entry.image_digest);  // integrity of the pixels themselves
    resolved.entries.push_back(
        ResolvedEntry{std::move(meta), entry.annotation_id, annotation(entry.annotation_id)});
  }
  return resolved;
}

DatasetManifest Repository::checkout_dataset(const Digest& dataset_id) const {
  return resolve_dataset(dataset_id).manifest;
}

std::vector<DatasetManifest> Repository::dataset_history(const Digest& dataset_id) const {
  std::vector<DatasetManifest> history{dataset_manifest(dataset_id)};
  while (history.back().parent) {
    history.push_back(dataset_manifest(*history.back().parent));
  }
  return history;
}

std::optional<Digest> Repository::dataset_head(std::string_view name) const {
  return store_.ref(kDatasetsRef, name);
}

Digest Repository::resolve_dataset_ref(std::string_view id_or_name) const {
  if (auto d = Digest::parse(id_or_name)) return *d;
  if (auto head = dataset_head(id_or_name)) return *head;
  fail(ErrorCode::kNotFound, "unknown dataset '" + std::string(id_or_name) + "'");
}

DatasetDiff Repository::diff_datasets(const Digest& a, const Digest& b) const {
  const DatasetManifest left = dataset_manifest(a);
  const DatasetManifest right = dataset_manifest(b);
  return diff_entries(left.entries, right.entries);
}

DisjointnessReport Repository::verify_disjoint(std::span<const Digest> development,
                                               const Digest& certification) const {
  const DatasetManifest cert = dataset_manifest(certification);
  if (cert.role != DatasetRole::kCertification) {
    fail(ErrorCode::kInvalidArgument,
         "dataset " + certification.str() + " has role '" +
             std::string(role_name(cert.role)) + "', not certification");
  }
  std::set<Digest> dev_images;
  std::set<std::string> dev_flights;
  for (const Digest& id : development) {
    const DatasetManifest dev = dataset_manifest(id);
    if (dev.role == DatasetRole::kCertification) {
      fail(ErrorCode::kInvalidArgument,
           "dataset " + id.str() + " is a certification dataset, not development");
    }
    for (const auto& e : dev.entries) {
      dev_images.insert(e.image_digest);
      dev_flights.insert(image_meta(e.image_digest).info.flight_id);
    }
  }
  std::set<Digest> image_overlap;
  std::set<std::string> flight_overlap;
  for (const auto& e : cert.entries) {
    if (dev_images.contains(e.image_digest)) image_overlap.insert(e.image_digest);
    const std::string flight = image_meta(e.image_digest).info.flight_id;
    if (dev_flights.contains(flight)) flight_overlap.insert(flight);
  }
  return DisjointnessReport{{image_overlap.begin(), image_overlap.end()},
                            {flight_overlap.begin(), flight_overlap.end()}};
}

std::vector<DatasetEntry> Repository::import_autolabels(std::istream& in,
                                                        const AutolabelOptions& options) {
  const std::string default_time =
      options.created_at.empty() ? utc_now() : options.created_at;
  std::vector<AnnotationRecord> records;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const Json json = parse_json(line, where);
      AnnotationRecord record{
          Digest::from_string(json_string(require_field(json, "image", where), "image")),
          std::nullopt,
          {},
          {},
          options.author,
          default_time};
      if (const Json* v = optional_field(json, "parent")) {
        record.parent = Digest::from_string(json_string(*v, "parent"));
      }
      if (const Json* v = optional_field(json, "author")) {
        record.author = json_string(*v, "author");
      }
      if (const Json* v = optional_field(json, "created_at")) {
        record.created_at = json_string(*v, "created_at");
      }
      if (const Json* boxes = optional_field(json, "boxes")) {
        if (!boxes->is_array()) fail(ErrorCode::kInvalidArgument, "boxes must be an array");
        for (const auto& b : *boxes) {
          BoundingBox box = box_from_json(b, "box");
          box.source = BoxSource::kAuto;
          record.boxes.push_back(std::move(box));
        }
      }
      if (const Json* attrs = optional_field(json, "attributes")) {
        record.attributes = attributes_from_json(*attrs, "attributes");
      }
      validate_annotation(record);
      records.push_back(std::move(record));
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.what());
    }
  }
  std::vector<DatasetEntry> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    out.push_back(DatasetEntry{record.image_digest, commit_annotation(record)});
  }
  return out;
}

std::vector<DatasetEntry> Repository::import_autolabels(const std::filesystem::path& path,
                                                        const AutolabelOptions& options) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  return import_autolabels(in, options);
}

std::vector<std::string> Repository::verify_references() const {
  std::vector<std::string> problems;
  auto check = [&](const std::string& owner, const Digest& target, std::string_view what) {
    if (!store_.contains(target)) {
      problems.push_back(owner + ": missing " + std::string(what) + " " + target.str());
      return false;
    }
    return true;
  };
  auto guarded = [&](const std::string& owner, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      problems.push_back(owner + ": " + e.what());
    }
  };
  for (const Digest& d : store_.list(ObjectKind::kImageMeta)) {
    const std::string owner = "image-meta " + d.str();
    guarded(owner, [&] {
      check(owner, image_meta_from_json(load_json(store_, d, "image meta")).image_digest,
            "image");
    });
  }
  for (const Digest& d : store_.list(ObjectKind::kAnnotation)) {
    const std::string owner = "annotation " + d.str();
    guarded(owner, [&] {
      const AnnotationRecord record = annotation(d);
      check(owner, record.image_digest, "image");
      if (record.parent) check(owner, *record.parent, "parent annotation");
    });
  }
  for (const Digest& d : store_.list(ObjectKind::kDatasetManifest)) {
    const std::string owner = "dataset " + d.str();
    guarded(owner, [&] {
      const DatasetManifest m = dataset_manifest(d);
      if (m.parent) check(owner, *m.parent, "parent dataset");
      for (const auto& e : m.entries) {
        check(owner, e.image_digest, "image");
        check(owner, e.annotation_id, "annotation");
      }
    });
  }
  return problems;
}

}  // namespace certkit
