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
#ifndef CERTKIT_REPOSITORY_HPP_
#define CERTKIT_REPOSITORY_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certkit/content_store.hpp"
#include "certkit/records.hpp"

namespace certkit {

struct AnnotationChange {
  Digest image_digest;
  Digest old_annotation;
  Digest new_annotation;

  friend bool operator==(const AnnotationChange&, const AnnotationChange&) = default;
};

// Entry-set difference from dataset a to dataset b. The three lists are
// disjoint by image digest and sorted by it. Added entries carry their
// annotation id so that apply_diff() can rebuild b from a.
struct DatasetDiff {
  std::vector<DatasetEntry> added;
  std::vector<Digest> removed;
  std::vector<AnnotationChange> annotation_changed;

  bool empty() const {
    return added.empty() && removed.empty() && annotation_changed.empty();
  }
};

DatasetDiff diff_entries(std::span<const DatasetEntry> a,
                         std::span<const DatasetEntry> b);
// Result is sorted by image digest.
std::vector<DatasetEntry> apply_diff(std::span<const DatasetEntry> a,
                                     const DatasetDiff& diff);

struct DisjointnessReport {
  std::vector<Digest> image_overlap;
  std::vector<std::string> flight_overlap;

  bool pass() const { return image_overlap.empty() && flight_overlap.empty(); }
};

struct ResolvedEntry {
  ImageMeta image;
  Digest annotation_id;
  AnnotationRecord annotation;
};

// A dataset manifest with every referenced object loaded and verified.
struct ResolvedDataset {
  DatasetManifest manifest;
  std::vector<ResolvedEntry> entries;  // same order as manifest.entries
};

struct AutolabelOptions {
  std::string author = "autolabel";
  std::string created_at;  // defaults to the current time when empty
};

// Versioned images, annotations and datasets on top of a ContentStore.
// Everything committed is immutable; dataset heads are tracked as named refs.
class Repository {
 public:
  explicit Repository(ContentStore& store) : store_(store) {}

  ContentStore& store() { return store_; }
  const ContentStore& store() const { return store_; }

  // Dimensions left at zero in info are taken from the image header.
  ImageMeta ingest_image(std::string_view bytes, ImageInfo info);
  ImageMeta image_meta(const Digest& image_digest) const;

  Digest commit_annotation(const AnnotationRecord& record);
  AnnotationRecord annotation(const Digest& annotation_id) const;
  // The id itself followed by its ancestors, root last.
  std::vector<Digest> annotation_chain(const Digest& annotation_id) const;

  Digest commit_dataset(const DatasetDraft& draft);
  // Manifest only, without touching the objects it references.
  DatasetManifest dataset_manifest(const Digest& dataset_id) const;
  // Loads the manifest and checks every object it references.
  DatasetManifest checkout_dataset(const Digest& dataset_id) const;
  ResolvedDataset resolve_dataset(const Digest& dataset_id) const;
  // Newest first.
  std::vector<DatasetManifest> dataset_history(const Digest& dataset_id) const;
  std::optional<Digest> dataset_head(std::string_view name) const;
  // Accepts a dataset id or a dataset name (resolved to its head).
  Digest resolve_dataset_ref(std::string_view id_or_name) const;

  DatasetDiff diff_datasets(const Digest& a, const Digest& b) const;
  DisjointnessReport verify_disjoint(std::span<const Digest> development,
                                     const Digest& certification) const;

  // One annotation per non-blank line; every box is marked source=auto.
  // The whole file is validated before anything is committed.
  std::vector<DatasetEntry> import_autolabels(std::istream& in,
                                              const AutolabelOptions& options);
  std::vector<DatasetEntry> import_autolabels(const std::filesystem::path& path,
                                              const AutolabelOptions& options);

  // Dangling references among stored images, annotations and datasets.
  std::vector<std::string> verify_references() const;

 private:
  void validate_annotation(const AnnotationRecord& record) const;

  ContentStore& store_;
};

}  // namespace certkit

#endif  // CERTKIT_REPOSITORY_HPP_
