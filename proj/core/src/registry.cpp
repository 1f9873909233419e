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

#include "certkit/registry.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "certkit/error.hpp"

namespace certkit {
namespace {

constexpr std::string_view kTraceType = "certkit.trace.v1";
constexpr std::string_view kManifestType = "certkit.model-manifest.v1";

Json digest_list(const std::vector<Digest>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(d.str());
  return out;
}

std::vector<Digest> parse_digest_list(const Json* json, std::string_view what) {
  std::vector<Digest> out;
  if (json == nullptr) return out;
  if (!json->is_array()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must be a list");
  }
  for (const Json& v : *json) out.push_back(Digest::from_string(json_string(v, what)));
  return out;
}

// Hyperparameters may be written by hand with native JSON values; they are
// normalized to strings so the canonical form stays float-free.
std::string scalar_text(const Json& v, std::string_view what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return format_decimal(v.get<double>());
  fail(ErrorCode::kInvalidArgument,
       std::string(what) + " values must be strings, numbers or booleans");
}

}  // namespace

std::string_view trace_kind_name(TraceKind kind) {
  switch (kind) {
    case TraceKind::kCodeRepo:
      return "code-repo";
    case TraceKind::kLibrary:
      return "library";
    case TraceKind::kDriver:
      return "driver";
    case TraceKind::kHardware:
      return "hardware";
  }
  return "unknown";
}

TraceKind trace_kind_from_name(std::string_view name) {
  for (auto k : {TraceKind::kCodeRepo, TraceKind::kLibrary, TraceKind::kDriver,
                 TraceKind::kHardware}) {
    if (trace_kind_name(k) == name) return k;
  }
  fail(ErrorCode::kInvalidArgument,
       "unknown trace entry kind '" + std::string(name) +
           "' (expected code-repo, library, driver or hardware)");
}

Json trace_to_json(const EnvironmentTrace& trace) {
  Json entries = Json::array();
  for (const auto& e : trace.entries) {
    Json j{{"component", e.component},
           {"kind", trace_kind_name(e.kind)},
           {"version", e.version}};
    if (e.content_digest) j["content_digest"] = e.content_digest->str();
    entries.push_back(std::move(j));
  }
  return Json{{"type", kTraceType}, {"entries", std::move(entries)}};
}

EnvironmentTrace parse_trace(const Json& json, std::vector<std::string>* warnings) {
  if (const Json* type = optional_field(json, "type")) {
    if (json_string(*type, "type") != kTraceType) {
      fail(ErrorCode::kInvalidArgument, "trace: unexpected type");
    }
  }
  const Json& entries = require_field(json, "entries", "trace");
  if (!entries.is_array()) fail(ErrorCode::kInvalidArgument, "trace: entries must be a list");
  EnvironmentTrace trace{Digest::of(""), {}};
  std::set<std::pair<std::string, TraceKind>> seen;
  for (const Json& e : entries) {
    TraceEntry entry;
    entry.component = json_string(require_field(e, "component", "trace entry"), "component");
    entry.kind = trace_kind_from_name(json_string(require_field(e, "kind", "trace entry"), "kind"));
    entry.version = json_string(require_field(e, "version", "trace entry"), "version");
    if (const Json* d = optional_field(e, "content_digest")) {
      entry.content_digest = Digest::from_string(json_string(*d, "content_digest"));
    }
    if (entry.component.empty() || entry.version.empty()) {
      fail(ErrorCode::kInvalidArgument, "trace: component and version are required");
    }
    if (!seen.emplace(entry.component, entry.kind).second) {
      fail(ErrorCode::kInvalidArgument,
           "trace: duplicate entry (" + entry.component + ", " +
               std::string(trace_kind_name(entry.kind)) + ")");
    }
    trace.entries.push_back(std::move(entry));
  }
  std::sort(trace.entries.begin(), trace.entries.end(), [](const auto& a, const auto& b) {
    return std::pair(a.component, a.kind) < std::pair(b.component, b.kind);
  });
  if (trace.entries.empty() && warnings != nullptr) {
    warnings->push_back("trace has no entries; it cannot support reproduction");
  }
  trace.trace_id = Digest::of(canonical_dump(trace_to_json(trace)));
  return trace;
}

Json model_manifest_to_json(const ModelManifest& m) {
  Json seeds = Json::object();
  for (const auto& [name, value] : m.random_seeds) seeds[name] = value;
  Json out{
      {"type", kManifestType},
      {"model_file_digest", m.model_file_digest.str()},
      {"training_code", m.training_code.str()},
      {"random_seeds", std::move(seeds)},
      {"train_datasets", digest_list(m.train_datasets)},
      {"eval_datasets", digest_list(m.eval_datasets)},
      {"hyperparameters", m.hyperparameters},
      {"metrics", m.metrics},
  };
  if (m.initial_weights_digest) out["initial_weights_digest"] = m.initial_weights_digest->str();
  if (m.parent_model) out["parent_model"] = m.parent_model->str();
  return out;
}

ModelManifest manifest_fields_from_json(const Json& json) {
  ModelManifest m{Digest::of(""),
                  Digest::of(""),
                  Digest::from_string(json_string(
                      require_field(json, "training_code", "model manifest"), "training_code")),
                  {}, std::nullopt, {}, {}, {}, {}, std::nullopt};
  if (const Json* seeds = optional_field(json, "random_seeds")) {
    if (!seeds->is_object()) {
      fail(ErrorCode::kInvalidArgument, "random_seeds must map names to integers");
    }
    for (const auto& [name, v] : seeds->items()) m.random_seeds[name] = json_int(v, name);
  }
  if (const Json* w = optional_field(json, "initial_weights_digest")) {
    m.initial_weights_digest = Digest::from_string(json_string(*w, "initial_weights_digest"));
  }
  m.train_datasets = parse_digest_list(optional_field(json, "train_datasets"), "train_datasets");
  m.eval_datasets = parse_digest_list(optional_field(json, "eval_datasets"), "eval_datasets");
  if (const Json* hp = optional_field(json, "hyperparameters")) {
    for (const auto& [k, v] : hp->items()) m.hyperparameters[k] = scalar_text(v, "hyperparameters");
  }
  if (const Json* metrics = optional_field(json, "metrics")) {
    for (const auto& [k, v] : metrics->items()) {
      m.metrics[k] = format_decimal(json_real(v, "metrics"));
    }
  }
  if (const Json* p = optional_field(json, "parent_model")) {
    m.parent_model = Digest::from_string(json_string(*p, "parent_model"));
  }
  return m;
}

ModelManifest model_manifest_from_json(const Json& json, const Digest& manifest_id) {
  if (json_string(require_field(json, "type", "model manifest"), "type") != kManifestType) {
    fail(ErrorCode::kInvalidArgument, "model manifest: unexpected type");
  }
  ModelManifest m = manifest_fields_from_json(json);
  m.manifest_id = manifest_id;
  m.model_file_digest = Digest::from_string(json_string(
      require_field(json, "model_file_digest", "model manifest"), "model_file_digest"));
  return m;
}

EnvironmentTrace Registry::import_trace(const Json& json, std::vector<std::string>* warnings) {
  EnvironmentTrace trace = parse_trace(json, warnings);
  repo_.store().put(canonical_dump(trace_to_json(trace)), ObjectKind::kTrace);
  return trace;
}

EnvironmentTrace Registry::import_trace(const std::filesystem::path& path,
                                        std::vector<std::string>* warnings) {
  return import_trace(parse_json(read_file(path), path.string()), warnings);
}

EnvironmentTrace Registry::trace(const Digest& trace_id) const {
  EnvironmentTrace t = parse_trace(parse_json(repo_.store().get(trace_id), "trace"), nullptr);
  t.trace_id = trace_id;
  return t;
}

void Registry::check_references(const ModelManifest& m) const {
  const ContentStore& store = repo_.store();
  auto require = [&](const Digest& d, std::string_view what) {
    if (!store.contains(d)) {
      fail(ErrorCode::kNotFound, "dangling reference: " + std::string(what) + " " + d.str());
    }
  };
  require(m.training_code, "trace");
  trace(m.training_code);
  if (m.initial_weights_digest) require(*m.initial_weights_digest, "initial weights");
  if (m.parent_model) require(*m.parent_model, "parent model");
  for (const auto& d : m.eval_datasets) require(d, "eval dataset");
  for (const auto& d : m.train_datasets) require(d, "train dataset");
}

ModelManifest Registry::register_model(std::string_view model_bytes, ModelManifest fields) {
  if (fields.train_datasets.empty()) {
    fail(ErrorCode::kInvalidArgument, "model manifest needs at least one training dataset");
  }
  check_references(fields);
  for (const auto& d : fields.train_datasets) {
    const DatasetManifest ds = repo_.dataset_manifest(d);
    if (ds.role == DatasetRole::kCertification) {
      fail(ErrorCode::kLeakage, "certification data used in training: dataset " +
                                    d.str() + " ('" + ds.name + "') has role certification");
    }
  }
  fields.model_file_digest = repo_.store().put(model_bytes, ObjectKind::kModelFile);
  fields.manifest_id = repo_.store().put(canonical_dump(model_manifest_to_json(fields)),
                                         ObjectKind::kModelManifest);
  return fields;
}

ModelManifest Registry::manifest(const Digest& manifest_id) const {
  return model_manifest_from_json(
      parse_json(repo_.store().get(manifest_id), "model manifest"), manifest_id);
}

bool Registry::verify_model_file(const Digest& manifest_id, std::string_view candidate) const {
  return Digest::of(candidate) == manifest(manifest_id).model_file_digest;
}

ReproductionReport Registry::verify_reproduction(const Digest& a, const Digest& b) const {
  const ModelManifest ma = manifest(a);
  const ModelManifest mb = manifest(b);
  ReproductionReport r;
  auto compare = [&](bool equal, std::string_view field) {
    if (!equal) r.differing_fields.emplace_back(field);
  };
  compare(ma.training_code == mb.training_code, kFieldTrainingCode);
  compare(ma.random_seeds == mb.random_seeds, kFieldRandomSeeds);
  compare(ma.initial_weights_digest == mb.initial_weights_digest, kFieldInitialWeights);
  compare(ma.train_datasets == mb.train_datasets, kFieldTrainDatasets);
  compare(ma.hyperparameters == mb.hyperparameters, kFieldHyperparameters);
  r.inputs_equal = r.differing_fields.empty();
  r.outputs_equal = ma.model_file_digest == mb.model_file_digest;
  compare(r.outputs_equal, kFieldModelFile);
  return r;
}

std::vector<AuditFinding> Registry::audit() const {
  std::vector<AuditFinding> findings;
  for (const Digest& id : repo_.store().list(ObjectKind::kModelManifest)) {
    try {
      const ModelManifest m = manifest(id);
      check_references(m);
      if (!repo_.store().contains(m.model_file_digest)) {
        findings.push_back({id, "model file " + m.model_file_digest.str() + " missing"});
      }
      for (const auto& d : m.train_datasets) {
        const DatasetManifest ds = repo_.dataset_manifest(d);
        if (ds.role == DatasetRole::kCertification) {
          findings.push_back({id, "certification data used in training: dataset " + d.str()});
        }
      }
    } catch (const Error& e) {
      findings.push_back({id, e.what()});
    }
  }
  return findings;
}

}  // namespace certkit
