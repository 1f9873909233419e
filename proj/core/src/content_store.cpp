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

#include "certkit/content_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>
#include <utility>

#include "certkit/error.hpp"

namespace fs = std::filesystem;

namespace certkit {
namespace {

constexpr std::array<std::pair<ObjectKind, std::string_view>, 12> kKindNames{{
    {ObjectKind::kImage, "image"},
    {ObjectKind::kImageMeta, "image-meta"},
    {ObjectKind::kAnnotation, "annotation"},
    {ObjectKind::kDatasetManifest, "dataset-manifest"},
    {ObjectKind::kModelFile, "model-file"},
    {ObjectKind::kModelManifest, "model-manifest"},
    {ObjectKind::kTrace, "trace"},
    {ObjectKind::kPredictionSet, "prediction-set"},
    {ObjectKind::kDomainSpec, "domain-spec"},
    {ObjectKind::kRequirementSpec, "requirement-spec"},
    {ObjectKind::kEvaluationReport, "evaluation-report"},
    {ObjectKind::kReportBundle, "report-bundle"},
}};

std::atomic<std::uint64_t> g_tmp_counter{0};

std::string tmp_name() {
  std::ostringstream os;
  os << ".tmp-" << ::getpid() << "-" << g_tmp_counter.fetch_add(1);
  return os.str();
}

bool valid_ref_component(std::string_view s) {
  if (s.empty() || s == "." || s == ".." || s.front() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

std::string_view kind_name(ObjectKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ObjectKind> kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

// Serializes writers within the process (mutex) and across processes
// (flock on store.lock).
class ContentStore::WriterLock {
 public:
  explicit WriterLock(const ContentStore& store)
      : guard_(store.writer_mutex_) {
    const auto path = store.root_ / "store.lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      if (fd_ >= 0) ::close(fd_);
      fail(ErrorCode::kIo, "cannot lock store at " + store.root_.string());
    }
  }
  ~WriterLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

 private:
  std::lock_guard<std::mutex> guard_;
  int fd_ = -1;
};

ContentStore::ContentStore(fs::path root) : root_(std::move(root)) {}

ContentStore ContentStore::init(const fs::path& root) {
  std::error_code ec;
  for (const char* sub : {"objects", "kinds", "refs"}) {
    fs::create_directories(root / sub, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create store: " + ec.message());
  }
  return ContentStore(root);
}

ContentStore ContentStore::open(const fs::path& root) {
  if (!fs::is_directory(root / "objects")) {
    fail(ErrorCode::kNotFound,
         "no certkit store at '" + root.string() + "' (run 'certkit init')");
  }
  return ContentStore(root);
}

fs::path ContentStore::object_path(const Digest& digest) const {
  return root_ / "objects" / digest.hex().substr(0, 2) / digest.hex().substr(2);
}

fs::path ContentStore::kinds_path(const Digest& digest) const {
  return root_ / "kinds" / digest.hex().substr(0, 2) / digest.hex().substr(2);
}

void ContentStore::write_atomic(const fs::path& target,
                                std::string_view bytes) const {
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + target.parent_path().string());
  const fs::path tmp = target.parent_path() / tmp_name();
  try {
    write_file(tmp, bytes);
  } catch (...) {
    fs::remove(tmp, ec);
    throw;
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot rename into " + target.string());
  }
}

std::vector<ObjectKind> ContentStore::read_kinds(const Digest& digest) const {
  std::vector<ObjectKind> kinds;
  std::ifstream in(kinds_path(digest));
  std::string line;
  while (std::getline(in, line)) {
    if (auto k = kind_from_name(line)) kinds.push_back(*k);
  }
  return kinds;
}

Digest ContentStore::put(std::string_view bytes, ObjectKind kind) {
  Digest digest = Digest::of(bytes);
  WriterLock lock(*this);
  const fs::path path = object_path(digest);
  if (!fs::exists(path)) write_atomic(path, bytes);

  auto kinds = read_kinds(digest);
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    kinds.push_back(kind);
    std::vector<std::string_view> names;
    for (auto k : kinds) names.push_back(kind_name(k));
    std::sort(names.begin(), names.end());
    std::string text;
    for (auto n : names) {
      text.append(n);
      text.push_back('\n');
    }
    write_atomic(kinds_path(digest), text);
  }
  return digest;
}

bool ContentStore::contains(const Digest& digest) const {
  return fs::is_regular_file(object_path(digest));
}

std::string ContentStore::get(const Digest& digest) const {
  const fs::path path = object_path(digest);
  if (!fs::is_regular_file(path)) {
    fail(ErrorCode::kNotFound, "object " + digest.str() + " not found");
  }
  std::string bytes = read_file(path);
  if (Digest::of(bytes) != digest) {
    fail(ErrorCode::kIntegrityViolation,
         "integrity violation: object " + digest.str() +
             " no longer matches its digest");
  }
  return bytes;
}

StoredObject ContentStore::stat(const Digest& digest) const {
  const fs::path path = object_path(digest);
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) fail(ErrorCode::kNotFound, "object " + digest.str() + " not found");
  return StoredObject{digest, read_kinds(digest), size};
}

std::vector<Digest> ContentStore::list(ObjectKind kind) const {
  std::vector<Digest> out;
  std::error_code ec;
  const fs::path base = root_ / "kinds";
  for (fs::recursive_directory_iterator it(base, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    if (p.filename().string().starts_with(".")) continue;
    auto d = Digest::parse(p.parent_path().filename().string() +
                           p.filename().string());
    if (!d) continue;
    auto kinds = read_kinds(*d);
    if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end()) {
      out.push_back(*std::move(d));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Digest> ContentStore::verify() const {
  std::vector<Digest> violations;
  std::error_code ec;
  const fs::path base = root_ / "objects";
  for (fs::recursive_directory_iterator it(base, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    if (p.filename().string().starts_with(".")) continue;
    auto d = Digest::parse(p.parent_path().filename().string() +
                           p.filename().string());
    if (!d) continue;
    if (Digest::of(read_file(p)) != *d) violations.push_back(*std::move(d));
  }
  std::sort(violations.begin(), violations.end());
  return violations;
}

void ContentStore::set_ref(std::string_view ns, std::string_view name,
                           const Digest& d) {
  if (!valid_ref_component(ns) || !valid_ref_component(name)) {
    fail(ErrorCode::kInvalidArgument,
         "invalid ref name '" + std::string(ns) + "/" + std::string(name) + "'");
  }
  WriterLock lock(*this);
  write_atomic(root_ / "refs" / ns / name, d.str() + "\n");
}

std::optional<Digest> ContentStore::ref(std::string_view ns,
                                        std::string_view name) const {
  if (!valid_ref_component(ns) || !valid_ref_component(name)) return std::nullopt;
  const fs::path p = root_ / "refs" / ns / name;
  if (!fs::is_regular_file(p)) return std::nullopt;
  std::string text = read_file(p);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  return Digest::parse(text);
}

}  // namespace certkit
