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
#ifndef CERTKIT_REGISTRY_HPP_
#define CERTKIT_REGISTRY_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "certkit/repository.hpp"

namespace certkit {

enum class TraceKind { kCodeRepo, kLibrary, kDriver, kHardware };

std::string_view trace_kind_name(TraceKind kind);
TraceKind trace_kind_from_name(std::string_view name);

struct TraceEntry {
  std::string component;
  TraceKind kind = TraceKind::kLibrary;
  std::string version;
  std::optional<Digest> content_digest;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// Versions of every code repository, library, driver and GPU that took part
// in a training run.
struct EnvironmentTrace {
  Digest trace_id;
  std::vector<TraceEntry> entries;  // sorted by (component, kind)
};

struct ModelManifest {
  Digest manifest_id;
  Digest model_file_digest;
  Digest training_code;  // EnvironmentTrace id
  std::map<std::string, std::int64_t> random_seeds;
  std::optional<Digest> initial_weights_digest;
  std::vector<Digest> train_datasets;
  std::vector<Digest> eval_datasets;
  std::map<std::string, std::string> hyperparameters;
  std::map<std::string, std::string> metrics;  // decimal strings
  std::optional<Digest> parent_model;
};

// Field names reported by verify_reproduction().
inline constexpr std::string_view kFieldTrainingCode = "training_code";
inline constexpr std::string_view kFieldRandomSeeds = "random_seeds";
inline constexpr std::string_view kFieldInitialWeights = "initial_weights_digest";
inline constexpr std::string_view kFieldTrainDatasets = "train_datasets";
inline constexpr std::string_view kFieldHyperparameters = "hyperparameters";
inline constexpr std::string_view kFieldModelFile = "model_file_digest";

struct ReproductionReport {
  bool inputs_equal = false;
  bool outputs_equal = false;
  std::vector<std::string> differing_fields;

  // Identical recorded inputs produced different model bytes.
  bool determinism_violation() const { return inputs_equal && !outputs_equal; }
};

struct AuditFinding {
  Digest manifest_id;
  std::string problem;
};

Json trace_to_json(const EnvironmentTrace& trace);
EnvironmentTrace parse_trace(const Json& json, std::vector<std::string>* warnings);

Json model_manifest_to_json(const ModelManifest& manifest);
ModelManifest model_manifest_from_json(const Json& json, const Digest& manifest_id);
// Reads the declarative fields of a registration request; model_file_digest
// and manifest_id are left for register_model() to fill in.
ModelManifest manifest_fields_from_json(const Json& json);

// Model provenance: declarative manifests ingested from the training
// environment, guarded against certification-data leakage.
class Registry {
 public:
  explicit Registry(Repository& repo) : repo_(repo) {}

  EnvironmentTrace import_trace(const Json& json, std::vector<std::string>* warnings = nullptr);
  EnvironmentTrace import_trace(const std::filesystem::path& path,
                                std::vector<std::string>* warnings = nullptr);
  EnvironmentTrace trace(const Digest& trace_id) const;

  // Stores the model bytes and the manifest. Throws Error(kLeakage) when a
  // certification-role dataset appears in train_datasets.
  ModelManifest register_model(std::string_view model_bytes, ModelManifest fields);
  ModelManifest manifest(const Digest& manifest_id) const;

  bool verify_model_file(const Digest& manifest_id, std::string_view candidate) const;
  ReproductionReport verify_reproduction(const Digest& a, const Digest& b) const;

  // Checks every stored model manifest for leakage and dangling references.
  std::vector<AuditFinding> audit() const;

 private:
  void check_references(const ModelManifest& m) const;

  Repository& repo_;
};

}  // namespace certkit

#endif  // CERTKIT_REGISTRY_HPP_
