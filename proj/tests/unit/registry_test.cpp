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

#include "certkit/error.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace certkit {
namespace {

using testing::pgm;
using testing::TempDir;

struct Fixture {
  TempDir dir;
  ContentStore store = ContentStore::init(dir.path());
  Repository repo{store};
  Registry registry{repo};
  Digest train = make_dataset("train", DatasetRole::kDevelopmentTrain, 1, "F1");
  Digest cert = make_dataset("cert", DatasetRole::kCertification, 2, "F2");
  EnvironmentTrace trace = registry.import_trace(parse_json(
      R"({"entries":[{"component":"trainer","kind":"code-repo","version":"4f2a9c1"},
                     {"component":"cuda","kind":"driver","version":"12.2"},
                     {"component":"torch","kind":"library","version":"2.3.0"}]})",
      "trace"));

  Digest make_dataset(const std::string& name, DatasetRole role, std::uint32_t tag,
                      const std::string& flight) {
    const ImageMeta meta = repo.ingest_image(pgm(tag), testing::image_info(flight));
    const Digest ann = repo.commit_annotation(
        AnnotationRecord{meta.image_digest, std::nullopt, {}, {}, "t", "2026-03-02T00:00:00Z"});
    return repo.commit_dataset(DatasetDraft{name, std::nullopt, role, {{meta.image_digest, ann}}});
  }

  ModelManifest fields(std::vector<Digest> train_sets) const {
    ModelManifest m{Digest::of(""), Digest::of(""), trace.trace_id, {{"torch", 7}, {"data", 11}},
                    std::nullopt, std::move(train_sets), {cert}, {{"lr", "0.001"}}, {},
                    std::nullopt};
    m.metrics["map"] = "0.79";
    return m;
  }
};

TEST_CASE("traces are canonical and reject duplicates") {
  Fixture f;
  CHECK(f.trace.entries.size() == 3);
  CHECK(f.trace.entries.front().component == "cuda");
  CHECK(f.registry.trace(f.trace.trace_id).entries == f.trace.entries);
  CHECK_THROWS_AS(parse_trace(parse_json(R"({"entries":[
      {"component":"a","kind":"library","version":"1"},
      {"component":"a","kind":"library","version":"2"}]})", "t"), nullptr), Error);
  std::vector<std::string> warnings;
  parse_trace(parse_json(R"({"entries":[]})", "t"), &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("register and verify a model") {
  Fixture f;
  const ModelManifest m = f.registry.register_model("weights-v1", f.fields({f.train}));
  CHECK(m.model_file_digest == Digest::of("weights-v1"));
  CHECK(f.store.get(m.model_file_digest) == "weights-v1");
  const ModelManifest loaded = f.registry.manifest(m.manifest_id);
  CHECK(loaded.random_seeds == m.random_seeds);
  CHECK(loaded.hyperparameters == m.hyperparameters);
  CHECK(loaded.metrics == m.metrics);
  CHECK(loaded.train_datasets == m.train_datasets);
  CHECK(f.registry.verify_model_file(m.manifest_id, "weights-v1"));
  CHECK_FALSE(f.registry.verify_model_file(m.manifest_id, "weights-v2"));
  CHECK(f.registry.audit().empty());
}

TEST_CASE("certification data in training is rejected") {
  Fixture f;
  try {
    f.registry.register_model("w", f.fields({f.train, f.cert}));
    FAIL("expected leakage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLeakage);
    CHECK(std::string(e.what()).find(f.cert.str()) != std::string::npos);
  }
  CHECK(f.store.list(ObjectKind::kModelManifest).empty());
}

TEST_CASE("dangling references are rejected") {
  Fixture f;
  ModelManifest m = f.fields({f.train});
  m.training_code = Digest::of("no such trace");
  CHECK_THROWS_AS(f.registry.register_model("w", m), Error);
  CHECK_THROWS_AS(f.registry.register_model("w", f.fields({})), Error);
}

TEST_CASE("audit flags a planted violation among several manifests") {
  Fixture f;
  f.registry.register_model("a", f.fields({f.train}));
  f.registry.register_model("b", f.fields({f.train}));
  // A manifest written around the registry, as an older tool might have.
  ModelManifest planted = f.fields({f.cert});
  planted.model_file_digest = f.store.put("c", ObjectKind::kModelFile);
  const Digest bad = f.store.put(canonical_dump(model_manifest_to_json(planted)),
                                 ObjectKind::kModelManifest);
  const auto findings = f.registry.audit();
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].manifest_id == bad);
  CHECK(findings[0].problem.find("certification") != std::string::npos);
}

TEST_CASE("reproduction semantics") {
  Fixture f;
  const auto a = f.registry.register_model("same", f.fields({f.train}));
  ModelManifest again = f.fields({f.train});
  again.metrics["map"] = "0.8";  // metrics are outputs, not inputs
  const auto b = f.registry.register_model("same", again);
  const auto same = f.registry.verify_reproduction(a.manifest_id, b.manifest_id);
  CHECK(same.inputs_equal);
  CHECK(same.outputs_equal);
  CHECK_FALSE(same.determinism_violation());

  const auto c = f.registry.register_model("different bytes", f.fields({f.train}));
  const auto drift = f.registry.verify_reproduction(a.manifest_id, c.manifest_id);
  CHECK(drift.inputs_equal);
  CHECK_FALSE(drift.outputs_equal);
  CHECK(drift.determinism_violation());

  ModelManifest reseeded = f.fields({f.train});
  reseeded.random_seeds["torch"] = 8;
  const auto d = f.registry.register_model("other", reseeded);
  const auto changed = f.registry.verify_reproduction(a.manifest_id, d.manifest_id);
  CHECK_FALSE(changed.inputs_equal);
  CHECK_FALSE(changed.determinism_violation());
  CHECK(changed.differing_fields == std::vector<std::string>{"random_seeds", "model_file_digest"});
}

}  // namespace
}  // namespace certkit
