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

#include "cli.hpp"

#include <fstream>
#include <sstream>

#include "certkit/repository.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace certkit {
namespace {

using testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

struct Workspace {
  TempDir dir;
  std::string store = (dir / "store").string();

  Workspace() { REQUIRE(cli({"init", "--store", store}).code == 0); }

  Outcome run(std::vector<std::string> args) const {
    args.insert(args.begin(), {"--store", store});
    return cli(std::move(args));
  }

  // Ingests one image through the CLI and returns its digest.
  std::string ingest(std::uint32_t tag, const std::string& flight) const {
    const auto file = dir / ("img" + std::to_string(tag) + ".pgm");
    write(file, testing::pgm(tag));
    const Outcome o = run({"ingest", file.string(), "--camera-id", "cam", "--flight-id", flight,
                           "--capture-time", "2026-03-01T00:00:00Z"});
    REQUIRE(o.code == 0);
    return parse_json(o.out, "ingest").at("image").get<std::string>();
  }

  std::string annotate(const std::string& image) const {
    const auto file = dir / "labels.jsonl";
    write(file, R"({"image":")" + image +
                    R"(","boxes":[{"x":1,"y":1,"w":5,"h":5,"class":"aircraft"}]})" + "\n");
    const Outcome o = run({"annotate", "import", file.string(), "--author", "t",
                           "--created-at", "2026-03-02T00:00:00Z"});
    REQUIRE(o.code == 0);
    return parse_json(o.out, "import").at(0).at("annotation").get<std::string>();
  }

  std::string create(const std::string& name, const std::string& role,
                     const std::vector<std::string>& images) const {
    Json entries = Json::array();
    for (const auto& img : images) {
      entries.push_back(Json{{"image", img}, {"annotation", annotate(img)}});
    }
    const auto file = dir / (name + ".entries.json");
    write(file, entries.dump());
    const Outcome o =
        run({"dataset", "create", "--name", name, "--role", role, "--entries", file.string()});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    return parse_json(o.out, "create").at("dataset").get<std::string>();
  }
};

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"dataset", "--help"}).code == 0);
  TempDir dir;
  CHECK(cli({"--store", (dir / "nowhere").string(), "store", "verify"}).code == 2);
  CHECK(cli({"--store", dir.path().string(), "--format", "xml", "store", "verify"}).code == 2);
  Workspace w;
  CHECK(w.run({"dataset", "checkout", "no-such-dataset"}).code == 2);
  CHECK(w.run({"store", "verify"}).code == 0);
}

TEST_CASE("dataset lifecycle through the CLI") {
  Workspace w;
  const std::string a = w.ingest(1, "F1");
  const std::string b = w.ingest(2, "F1");
  const std::string id = w.create("set", "development-train", {a});
  CHECK(w.run({"dataset", "create", "--name", "set", "--role", "certification", "--entries",
               (w.dir / "set.entries.json").string()})
            .code == 2);

  Json add = Json::array({Json{{"image", b}, {"annotation", w.annotate(b)}}});
  write(w.dir / "add.json", add.dump());
  const Outcome c = w.run({"dataset", "commit", "set", "--add", (w.dir / "add.json").string()});
  REQUIRE(c.code == 0);
  const Json v2 = parse_json(c.out, "commit");
  CHECK(v2.at("version") == 2);
  CHECK(v2.at("entries") == 2);

  const Outcome h = w.run({"dataset", "history", "set"});
  CHECK(h.code == 0);
  const Outcome d = w.run({"dataset", "diff", id, v2.at("dataset").get<std::string>()});
  CHECK(d.code == 0);

  const Outcome co1 = w.run({"dataset", "checkout", id});
  const Outcome co2 = w.run({"dataset", "checkout", id});
  CHECK(co1.code == 0);
  CHECK(co1.out == co2.out);
}

TEST_CASE("disjointness exit codes") {
  Workspace w;
  const std::string shared = w.ingest(1, "F1");
  const std::string dev_only = w.ingest(2, "F2");
  const std::string cert_only = w.ingest(3, "F3");
  const std::string dev = w.create("dev", "development-train", {shared, dev_only});
  const std::string cert = w.create("cert", "certification", {shared});
  const std::string clean = w.create("clean", "certification", {cert_only});
  const Outcome bad = w.run({"dataset", "verify-disjoint", "--cert", cert, "--dev", dev});
  CHECK(bad.code == 1);
  CHECK(bad.err.find(Digest::from_string(shared).str()) != std::string::npos);
  CHECK(w.run({"dataset", "verify-disjoint", "--cert", clean, "--dev", dev}).code == 0);
}

TEST_CASE("model registration and leakage") {
  Workspace w;
  const std::string shared = w.ingest(1, "F1");
  const std::string dev = w.create("dev", "development-train", {shared});
  const std::string cert = w.create("cert", "certification", {shared});
  write(w.dir / "trace.json",
        R"({"entries":[{"component":"trainer","kind":"code-repo","version":"abc"}]})");
  const Outcome t = w.run({"model", "trace", (w.dir / "trace.json").string()});
  REQUIRE(t.code == 0);
  const std::string trace = parse_json(t.out, "trace").at("trace").get<std::string>();
  write(w.dir / "model.bin", "weights");

  Json manifest{{"training_code", trace},
                {"random_seeds", Json{{"torch", 1}}},
                {"train_datasets", Json::array({dev, cert})},
                {"eval_datasets", Json::array({cert})}};
  write(w.dir / "leaky.json", manifest.dump());
  const Outcome leak = w.run({"model", "register", "--model-file", (w.dir / "model.bin").string(),
                              "--manifest", (w.dir / "leaky.json").string()});
  CHECK(leak.code == 1);

  manifest["train_datasets"] = Json::array({dev});
  write(w.dir / "ok.json", manifest.dump());
  const Outcome ok = w.run({"model", "register", "--model-file", (w.dir / "model.bin").string(),
                            "--manifest", (w.dir / "ok.json").string()});
  REQUIRE(ok.code == 0);
  const std::string id = parse_json(ok.out, "register").at("manifest_id").get<std::string>();
  CHECK(w.run({"model", "verify", id, "--model-file", (w.dir / "model.bin").string()}).code == 0);
  write(w.dir / "other.bin", "weightz");
  CHECK(w.run({"model", "verify", id, "--model-file", (w.dir / "other.bin").string()}).code == 1);
  CHECK(w.run({"model", "audit"}).code == 0);
  CHECK(w.run({"model", "show", id}).code == 0);
}

TEST_CASE("synthetic pipeline, evaluation and report") {
  Workspace w;
  write(w.dir / "synth.json", R"({"n_encounters":8})");
  const auto preds = (w.dir / "p.jsonl").string();
  const Outcome s = w.run({"synth", "--config", (w.dir / "synth.json").string(), "--out-dataset",
                           "synth", "--predictions-out", preds});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  write(w.dir / "domain.json",
        R"({"dimensions":[{"name":"intruder_range_m","kind":"numeric",
            "bins":[[0,375],[375,750],[750,1115],[1115,1500]],"min_count":1}]})");
  write(w.dir / "pass.json", R"({"min_map":0.1})");
  write(w.dir / "fail.json", R"({"min_map":0.99})");

  const Outcome pass = w.run({"eval", "run", "--predictions", preds, "--dataset", "synth",
                              "--requirements", (w.dir / "pass.json").string(), "--domain",
                              (w.dir / "domain.json").string()});
  REQUIRE_MESSAGE(pass.code == 0, pass.err);
  const Outcome fail = w.run({"eval", "run", "--predictions", preds, "--dataset", "synth",
                              "--requirements", (w.dir / "fail.json").string(), "--domain",
                              (w.dir / "domain.json").string()});
  CHECK(fail.code == 1);
  CHECK(fail.err.find("min_map") != std::string::npos);

  const Outcome sens =
      w.run({"eval", "sensitivity", "--predictions", preds, "--dataset", "synth"});
  CHECK(sens.code == 0);
  CHECK(sens.out.rfind("bin_lo,bin_hi,ap,n_gt", 0) == 0);
  const Outcome stab = w.run({"stability", "--predictions", preds, "--dataset", "synth"});
  CHECK(stab.code == 0);
  CHECK(stab.out.rfind("sequence_id,track", 0) == 0);
  const Outcome cov = w.run({"coverage", "--dataset", "synth", "--domain",
                             (w.dir / "domain.json").string()});
  CHECK(cov.code == 0);

  const std::string report_id = parse_json(pass.out, "eval").at("report_id").get<std::string>();
  const auto out = (w.dir / "bundle").string();
  const Outcome rep =
      w.run({"report", "--evaluation", report_id, "--out", out, "--with-stability"});
  REQUIRE_MESSAGE(rep.code == 0, rep.err);
  CHECK(w.run({"store", "verify-report", out}).code == 0);
  std::ofstream(w.dir / "bundle" / "requirements.csv", std::ios::app) << "x";
  CHECK(w.run({"store", "verify-report", out}).code == 1);
}

TEST_CASE("store verify detects a flipped byte") {
  Workspace w;
  const std::string img = w.ingest(1, "F1");
  const std::string hex = Digest::from_string(img).hex();
  const auto object = std::filesystem::path(w.store) / "objects" / hex.substr(0, 2) / hex.substr(2);
  REQUIRE(std::filesystem::exists(object));
  std::filesystem::permissions(object, std::filesystem::perms::owner_write,
                               std::filesystem::perm_options::add);
  std::fstream f(object, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(20);
  const char c = static_cast<char>(f.get());
  f.seekp(20);
  f.put(static_cast<char>(c ^ 0x5a));
  f.close();
  const Outcome o = w.run({"store", "verify"});
  CHECK(o.code == 1);
  CHECK(o.out.find(hex) != std::string::npos);
}

}  // namespace
}  // namespace certkit
