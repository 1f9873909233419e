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

#include "certkit/report.hpp"

#include <fstream>
#include <iterator>

#include "certkit/synthgen.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace certkit {
namespace {

using testing::TempDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Pipeline {
  TempDir dir;
  ContentStore store = ContentStore::init(dir / "store");
  Repository repo{store};
  Registry registry{repo};
  SyntheticResult synth = generate(repo, config(), "synth");
  OperationalDomainSpec domain{Digest::of(""), {standard_range_dimension()}};
  EvaluationReport evaluation = run_evaluation(
      repo, registry, synth.predictions.prediction_set_id,
      parse_requirement_spec(parse_json(
          R"({"min_map":0.1,"partitions":[{"dimension":"intruder_range_m","bin":0,"min_ap":0.5}]})",
          "req")),
      domain);

  static SyntheticConfig config() {
    SyntheticConfig c = default_synthetic_config();
    c.n_encounters = 8;
    return c;
  }
};

TEST_CASE("report bundles are byte-identical across stores") {
  Pipeline a;
  Pipeline b;
  CHECK(a.evaluation.report_id == b.evaluation.report_id);
  const auto ra = generate_report(a.repo, a.evaluation.report_id, a.dir / "out");
  const auto rb = generate_report(b.repo, b.evaluation.report_id, b.dir / "out");
  CHECK(ra.bundle_digest == rb.bundle_digest);
  REQUIRE(ra.files == rb.files);
  for (const auto& name : ra.files) {
    CHECK_MESSAGE(slurp(ra.directory / name) == slurp(rb.directory / name), name);
  }
  CHECK(a.store.contains(ra.bundle_digest));
  CHECK(Digest::of(slurp(ra.directory / "report.json")) == ra.bundle_digest);
}

TEST_CASE("report contents") {
  Pipeline p;
  const auto r = generate_report(p.repo, p.evaluation.report_id, p.dir / "out");
  CHECK(slurp(r.directory / "sensitivity.csv") == sensitivity_csv(p.evaluation.partitions));
  CHECK(slurp(r.directory / "requirements.csv") == requirements_csv(p.evaluation.requirements));
  CHECK(std::find(r.files.begin(), r.files.end(), "stability.csv") == r.files.end());
  const Json bundle = parse_json(slurp(r.directory / "report.json"), "report");
  bool noted = false;
  for (const auto& n : bundle.at("notes")) {
    noted = noted || n.get<std::string>().find("stability") != std::string::npos;
  }
  CHECK(noted);
  CHECK(bundle.at("provenance").at("evaluation_report") == p.evaluation.report_id.str());
  CHECK(bundle.at("provenance").at("model_manifest").is_null());
  const std::string svg = slurp(r.directory / "sensitivity.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(verify_report_bundle(p.store, r.directory).empty());
}

TEST_CASE("report with stability section") {
  Pipeline p;
  ReportOptions options;
  options.stability = flicker_analysis(
      build_timelines(p.repo, p.synth.predictions, 0.5, 0.5));
  const auto r = generate_report(p.repo, p.evaluation.report_id, p.dir / "out", options);
  CHECK(std::find(r.files.begin(), r.files.end(), "stability.csv") != r.files.end());
  CHECK(slurp(r.directory / "stability.csv") == stability_csv(*options.stability));
}

TEST_CASE("tampering is detected") {
  Pipeline p;
  const auto r = generate_report(p.repo, p.evaluation.report_id, p.dir / "out");
  {
    std::ofstream out(r.directory / "sensitivity.csv", std::ios::app);
    out << "extra\n";
  }
  const auto problems = verify_report_bundle(p.store, r.directory);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0] == "sensitivity.csv: checksum mismatch");
}

TEST_CASE("sensitivity csv layout") {
  PartitionResult part{"intruder_range_m", 0, "[0,375)", Interval{0, 375}, 0.5, 10, 7};
  PartitionResult none{"intruder_range_m", 1, "[375,750)", Interval{375, 750}, std::nullopt, 0, 0};
  const std::vector<PartitionResult> parts{part, none};
  CHECK(sensitivity_csv(parts) ==
        "bin_lo,bin_hi,ap,n_gt,dimension,label,n_images\n"
        "0,375,0.5,10,intruder_range_m,\"[0,375)\",7\n"
        "375,750,,0,intruder_range_m,\"[375,750)\",0\n");
}

}  // namespace
}  // namespace certkit
