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
#ifndef CERTKIT_CONTENT_STORE_HPP_
#define CERTKIT_CONTENT_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "certkit/digest.hpp"

namespace certkit {

enum class ObjectKind {
  kImage,
  kImageMeta,
  kAnnotation,
  kDatasetManifest,
  kModelFile,
  kModelManifest,
  kTrace,
  kPredictionSet,
  kDomainSpec,
  kRequirementSpec,
  kEvaluationReport,
  kReportBundle,
};

std::string_view kind_name(ObjectKind kind);
std::optional<ObjectKind> kind_from_name(std::string_view name);

struct StoredObject {
  Digest digest;
  std::vector<ObjectKind> kinds;  // every kind the bytes were stored under
  std::uint64_t byte_length = 0;
};

// Append-only content-addressed object store rooted at a directory:
//
//   <root>/objects/<hex[0:2]>/<hex[2:64]>   object bytes
//   <root>/kinds/<hex[0:2]>/<hex[2:64]>     newline-separated kind names
//   <root>/refs/<namespace>/<name>          mutable named pointers
//   <root>/store.lock                       writer lock
//
// Readers never lock. Writers serialize on an in-process mutex plus an
// advisory file lock, and every file is written to a temporary name and
// renamed into place.
class ContentStore {
 public:
  // Creates the directory layout if missing.
  static ContentStore init(const std::filesystem::path& root);
  // Opens an existing store; throws Error(kNotFound) if there is none.
  static ContentStore open(const std::filesystem::path& root);

  ContentStore(ContentStore&&) = delete;
  ContentStore& operator=(ContentStore&&) = delete;

  const std::filesystem::path& root() const { return root_; }

  Digest put(std::string_view bytes, ObjectKind kind);

  // Throws Error(kNotFound) or Error(kIntegrityViolation).
  std::string get(const Digest& digest) const;
  bool contains(const Digest& digest) const;
  StoredObject stat(const Digest& digest) const;

  // Digests of all objects stored under the kind, sorted.
  std::vector<Digest> list(ObjectKind kind) const;

  // Objects whose bytes no longer hash to their digest, sorted.
  std::vector<Digest> verify() const;

  void set_ref(std::string_view ns, std::string_view name, const Digest& d);
  std::optional<Digest> ref(std::string_view ns, std::string_view name) const;

  std::filesystem::path object_path(const Digest& digest) const;

 private:
  explicit ContentStore(std::filesystem::path root);

  class WriterLock;

  void write_atomic(const std::filesystem::path& target,
                    std::string_view bytes) const;
  std::vector<ObjectKind> read_kinds(const Digest& digest) const;
  std::filesystem::path kinds_path(const Digest& digest) const;

  std::filesystem::path root_;
  mutable std::mutex writer_mutex_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace certkit

#endif  // CERTKIT_CONTENT_STORE_HPP_
