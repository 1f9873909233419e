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

#include "certkit/evaluation.hpp"
#include "certkit/synthgen.hpp"
#include "doctest.h"

namespace certkit {
namespace {

const std::filesystem::path kConfigs = std::filesystem::path(CERTKIT_SOURCE_DIR) / "configs";

TEST_CASE("shipped synthetic config is the built-in default") {
  const SyntheticConfig shipped = load_synthetic_config(kConfigs / "synth_default.json");
  CHECK(canonical_dump(synthetic_config_to_json(shipped)) ==
        canonical_dump(synthetic_config_to_json(default_synthetic_config())));
}

TEST_CASE("shipped example files parse") {
  const auto domain = load_domain_spec(kConfigs / "domain_range.json");
  CHECK(domain.dimensions.size() == 2);
  const auto req = load_requirement_spec(kConfigs / "requirements_example.json");
  CHECK(req.partitions.size() == 2);
  std::vector<std::string> warnings;
  const auto trace = parse_trace(
      parse_json(read_file(kConfigs / "trace_example.json"), "trace"), &warnings);
  CHECK(trace.entries.size() == 4);
  CHECK(warnings.empty());
}

}  // namespace
}  // namespace certkit
