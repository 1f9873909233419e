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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "certkit/content_store.hpp"
#include "certkit/error.hpp"
#include "certkit/evaluation.hpp"
#include "certkit/odd.hpp"
#include "certkit/registry.hpp"
#include "certkit/report.hpp"
#include "certkit/repository.hpp"
#include "certkit/stability.hpp"
#include "certkit/synthgen.hpp"
#include "certkit/timestamp.hpp"

namespace certkit::cli {
namespace {

struct Globals {
  std::string store;
  std::string format;  // empty: the command's default
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIntegrityViolation:
    case ErrorCode::kLeakage:
      return kExitVerificationFailed;
    default:
      return kExitUsage;
  }
}

std::filesystem::path store_root(const Globals& g) {
  if (!g.store.empty()) return g.store;
  if (const char* env = std::getenv("CERTKIT_STORE"); env != nullptr && *env != '\0') {
    return env;
  }
  fail(ErrorCode::kInvalidArgument, "no store given: pass --store or set CERTKIT_STORE");
}

bool csv_output(const Globals& g, bool csv_by_default) {
  return g.format.empty() ? csv_by_default : g.format == "csv";
}

void emit(std::ostream& out, const Json& json) { out << json.dump(2) << "\n"; }

Json entries_json(const std::vector<DatasetEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back(Json{{"image", e.image_digest.str()}, {"annotation", e.annotation_id.str()}});
  }
  return out;
}

std::vector<DatasetEntry> read_entries(const std::string& path) {
  const Json j = parse_json(read_file(path), path);
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, path + ": expected a list of entries");
  std::vector<DatasetEntry> out;
  for (const Json& e : j) {
    out.push_back(DatasetEntry{
        Digest::from_string(json_string(require_field(e, "image", path), "image")),
        Digest::from_string(json_string(require_field(e, "annotation", path), "annotation"))});
  }
  return out;
}

std::vector<Digest> read_digests(const std::string& path) {
  const Json j = parse_json(read_file(path), path);
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, path + ": expected a list of digests");
  std::vector<Digest> out;
  for (const Json& d : j) out.push_back(Digest::from_string(json_string(d, "digest")));
  return out;
}

Json manifest_summary(const DatasetManifest& m) {
  Json j{{"dataset", m.dataset_id.str()},
         {"name", m.name},
         {"version", m.version},
         {"role", role_name(m.role)},
         {"entries", m.entries.size()},
         {"parent", nullptr}};
  if (m.parent) j["parent"] = m.parent->str();
  return j;
}

Json diff_json(const DatasetDiff& diff) {
  Json removed = Json::array();
  for (const auto& d : diff.removed) removed.push_back(d.str());
  Json changed = Json::array();
  for (const auto& c : diff.annotation_changed) {
    changed.push_back(Json{{"image", c.image_digest.str()},
                           {"old", c.old_annotation.str()},
                           {"new", c.new_annotation.str()}});
  }
  return Json{{"added", entries_json(diff.added)},
              {"removed", std::move(removed)},
              {"annotation_changed", std::move(changed)}};
}

std::optional<Digest> optional_digest(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return Digest::from_string(text);
}

// A predictions file is parsed and stored; a stored prediction-set digest is
// loaded as is.
PredictionSet resolve_predictions(Repository& repo, const std::string& arg,
                                  const std::string& dataset_ref, const std::string& model) {
  if (std::filesystem::is_regular_file(arg)) {
    if (dataset_ref.empty()) {
      fail(ErrorCode::kInvalidArgument, "--dataset is required with a predictions file");
    }
    std::ifstream in(arg, std::ios::binary);
    PredictionSet set =
        parse_predictions(in, repo.resolve_dataset_ref(dataset_ref), optional_digest(model));
    store_predictions(repo.store(), set);
    return set;
  }
  const auto id = Digest::parse(arg);
  if (!id || !repo.store().contains(*id)) {
    fail(ErrorCode::kNotFound, "predictions not found: " + arg);
  }
  PredictionSet set = load_predictions(repo.store(), *id);
  if (!dataset_ref.empty() && repo.resolve_dataset_ref(dataset_ref) != set.dataset_id) {
    fail(ErrorCode::kInvalidArgument, "prediction set " + id->str() + " belongs to dataset " +
                                          set.dataset_id.str());
  }
  return set;
}

Json partitions_json(const std::vector<PartitionResult>& parts) {
  Json out = Json::array();
  for (const auto& p : parts) {
    Json j{{"dimension", p.dimension},
           {"bin", p.bin},
           {"label", p.label},
           {"ap", p.ap ? Json(*p.ap) : Json(nullptr)},
           {"n_gt", p.n_gt},
           {"n_images", p.n_images}};
    if (p.interval) {
      j["bin_lo"] = p.interval->lo;
      j["bin_hi"] = p.interval->hi;
    }
    out.push_back(std::move(j));
  }
  return out;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    app_.name("certkit");
    app_.description("Certification evidence toolkit for vision-based detectors");
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.add_option("--store", g_.store, "Store root (default: $CERTKIT_STORE)");
    app_.add_option("--format", g_.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    add_init();
    add_ingest();
    add_annotate();
    add_dataset();
    add_coverage();
    add_model();
    add_eval();
    add_stability();
    add_synth();
    add_report();
    add_store();
  }

  int run(std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    try {
      app_.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
      out_ << help_target()->help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app_.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n" << help_target()->help();
      return kExitUsage;
    }
    try {
      return action_();
    } catch (const Error& e) {
      err_ << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
      return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
      err_ << "error: io: " << e.what() << "\n";
      return kExitUsage;
    }
  }

 private:
  CLI::App* help_target() {
    CLI::App* app = &app_;
    for (;;) {
      auto subs = app->get_subcommands();
      if (subs.empty()) return app;
      app = subs.front();
    }
  }

  CLI::App* command(CLI::App& parent, const std::string& name, const std::string& desc,
                    std::function<int()> action) {
    CLI::App* sub = parent.add_subcommand(name, desc);
    sub->callback([this, action] { action_ = action; });
    return sub;
  }

  ContentStore& store() {
    if (!store_) store_.reset(new ContentStore(ContentStore::open(store_root(g_))));
    return *store_;
  }
  Repository& repo() {
    if (!repo_) repo_.emplace(store());
    return *repo_;
  }
  Registry& registry() {
    if (!registry_) registry_.emplace(repo());
    return *registry_;
  }

  void add_init() {
    command(app_, "init", "Create an empty store", [this] {
      const auto root = store_root(g_);
      ContentStore::init(root);
      emit(out_, Json{{"store", root.string()}});
      return kExitOk;
    });
  }

  void add_ingest() {
    auto* o = &opts_.ingest;
    auto* sub = command(app_, "ingest", "Store an image with its metadata", [this, o] {
      ImageInfo info;
      info.width = o->width;
      info.height = o->height;
      info.capture_time = o->capture_time.empty() ? utc_now() : o->capture_time;
      info.camera_id = o->camera_id;
      info.flight_id = o->flight_id;
      if (!o->sequence_id.empty()) info.sequence_id = o->sequence_id;
      if (o->frame_index >= 0) info.frame_index = o->frame_index;
      const ImageMeta meta = repo().ingest_image(read_file(o->file), info);
      emit(out_, image_meta_to_json(meta));
      return kExitOk;
    });
    sub->add_option("file", o->file, "Image file")->required()->check(CLI::ExistingFile);
    sub->add_option("--camera-id", o->camera_id)->required();
    sub->add_option("--flight-id", o->flight_id)->required();
    sub->add_option("--capture-time", o->capture_time, "UTC YYYY-MM-DDTHH:MM:SSZ");
    sub->add_option("--sequence-id", o->sequence_id);
    sub->add_option("--frame-index", o->frame_index)->check(CLI::NonNegativeNumber);
    sub->add_option("--width", o->width, "Override; 0 reads the header");
    sub->add_option("--height", o->height, "Override; 0 reads the header");
  }

  void add_annotate() {
    auto* annotate = app_.add_subcommand("annotate", "Annotation records");
    annotate->require_subcommand(1);
    auto* o = &opts_.annotate;
    auto* sub = command(*annotate, "import", "Import auto-labels (JSON lines)", [this, o] {
      AutolabelOptions options;
      options.author = o->author;
      options.created_at = o->created_at;
      emit(out_, entries_json(repo().import_autolabels(std::filesystem::path(o->file), options)));
      return kExitOk;
    });
    sub->add_option("file", o->file)->required()->check(CLI::ExistingFile);
    sub->add_option("--author", o->author);
    sub->add_option("--created-at", o->created_at);
  }

  void add_dataset() {
    auto* ds = app_.add_subcommand("dataset", "Versioned datasets");
    ds->require_subcommand(1);
    auto* o = &opts_.dataset;

    auto* create = command(*ds, "create", "Commit the first version of a dataset", [this, o] {
      if (repo().dataset_head(o->name)) {
        fail(ErrorCode::kConflict, "dataset '" + o->name + "' already exists; use commit");
      }
      const Digest id = repo().commit_dataset(
          DatasetDraft{o->name, std::nullopt, role_from_name(o->role), read_entries(o->entries)});
      emit(out_, manifest_summary(repo().dataset_manifest(id)));
      return kExitOk;
    });
    create->add_option("--name", o->name)->required();
    create->add_option("--role", o->role)->required();
    create->add_option("--entries", o->entries, "JSON list of {image, annotation}")
        ->required()
        ->check(CLI::ExistingFile);

    auto* commit = command(*ds, "commit", "Commit a new version on top of a parent", [this, o] {
      const Digest parent_id = repo().resolve_dataset_ref(o->ref);
      const DatasetManifest parent = repo().dataset_manifest(parent_id);
      std::vector<DatasetEntry> entries =
          o->entries.empty() ? parent.entries : read_entries(o->entries);
      DatasetDiff diff;
      if (!o->add.empty()) diff.added = read_entries(o->add);
      if (!o->remove.empty()) diff.removed = read_digests(o->remove);
      // Added entries replace the annotation of images already present.
      std::vector<DatasetEntry> additions;
      for (const auto& a : diff.added) {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const DatasetEntry& e) {
          return e.image_digest == a.image_digest;
        });
        if (it != entries.end()) {
          it->annotation_id = a.annotation_id;
        } else {
          additions.push_back(a);
        }
      }
      diff.added = std::move(additions);
      entries = apply_diff(entries, diff);
      const DatasetRole role = o->role.empty() ? parent.role : role_from_name(o->role);
      const Digest id =
          repo().commit_dataset(DatasetDraft{parent.name, parent_id, role, std::move(entries)});
      emit(out_, manifest_summary(repo().dataset_manifest(id)));
      return kExitOk;
    });
    commit->add_option("parent", o->ref, "Parent dataset id or name")->required();
    commit->add_option("--entries", o->entries, "Replace the entry list");
    commit->add_option("--add", o->add, "Entries to add or re-annotate");
    commit->add_option("--remove", o->remove, "JSON list of image digests to drop");
    commit->add_option("--role", o->role);

    auto* checkout = command(*ds, "checkout", "Print a dataset manifest", [this, o] {
      const DatasetManifest m = repo().checkout_dataset(repo().resolve_dataset_ref(o->ref));
      const std::string bytes = repo().store().get(m.dataset_id);
      if (!o->out.empty()) {
        write_file(o->out, bytes);
        emit(out_, manifest_summary(m));
      } else {
        out_ << bytes << "\n";
      }
      return kExitOk;
    });
    checkout->add_option("dataset", o->ref)->required();
    checkout->add_option("--out", o->out, "Write the canonical manifest here");

    auto* diff = command(*ds, "diff", "Difference between two versions", [this, o] {
      emit(out_, diff_json(repo().diff_datasets(repo().resolve_dataset_ref(o->ref),
                                                repo().resolve_dataset_ref(o->other))));
      return kExitOk;
    });
    diff->add_option("a", o->ref)->required();
    diff->add_option("b", o->other)->required();

    auto* history = command(*ds, "history", "Lineage, newest first", [this, o] {
      Json rows = Json::array();
      for (const auto& m : repo().dataset_history(repo().resolve_dataset_ref(o->ref))) {
        rows.push_back(manifest_summary(m));
      }
      emit(out_, rows);
      return kExitOk;
    });
    history->add_option("dataset", o->ref)->required();

    auto* disjoint = command(*ds, "verify-disjoint",
                             "Check development datasets against a certification dataset",
                             [this, o] {
      std::vector<Digest> dev;
      for (const auto& r : o->development) dev.push_back(repo().resolve_dataset_ref(r));
      const auto report = repo().verify_disjoint(dev, repo().resolve_dataset_ref(o->ref));
      Json images = Json::array();
      for (const auto& d : report.image_overlap) images.push_back(d.str());
      emit(out_, Json{{"pass", report.pass()},
                      {"image_overlap", std::move(images)},
                      {"flight_overlap", report.flight_overlap}});
      for (const auto& d : report.image_overlap) err_ << "shared image: " << d.str() << "\n";
      for (const auto& f : report.flight_overlap) err_ << "shared flight_id: " << f << "\n";
      return report.pass() ? kExitOk : kExitVerificationFailed;
    });
    disjoint->add_option("--cert", o->ref, "Certification dataset")->required();
    disjoint->add_option("--dev", o->development, "Development datasets")->required();
  }

  void add_coverage() {
    auto* o = &opts_.coverage;
    auto* sub = command(app_, "coverage", "Operational-domain coverage of a dataset", [this, o] {
      const OperationalDomainSpec spec = load_domain_spec(o->domain);
      CoverageOptions options;
      if (!o->cross.empty()) {
        const auto comma = o->cross.find(',');
        if (comma == std::string::npos) {
          fail(ErrorCode::kInvalidArgument, "--cross expects dimA,dimB");
        }
        options.cross = std::pair{o->cross.substr(0, comma), o->cross.substr(comma + 1)};
      }
      const CoverageReport report =
          coverage(repo(), repo().resolve_dataset_ref(o->dataset), spec, options);
      if (csv_output(g_, false)) {
        out_ << coverage_csv(report);
      } else {
        emit(out_, coverage_to_json(report));
      }
      return report.overall_pass ? kExitOk : kExitVerificationFailed;
    });
    sub->add_option("--dataset", o->dataset)->required();
    sub->add_option("--domain", o->domain)->required()->check(CLI::ExistingFile);
    sub->add_option("--cross", o->cross, "dimA,dimB");
  }

  void add_model() {
    auto* model = app_.add_subcommand("model", "Model provenance");
    model->require_subcommand(1);
    auto* o = &opts_.model;

    auto* trace = command(*model, "trace", "Import an environment trace", [this, o] {
      std::vector<std::string> warnings;
      const auto t = registry().import_trace(std::filesystem::path(o->file), &warnings);
      for (const auto& w : warnings) err_ << "warning: " << w << "\n";
      emit(out_, Json{{"trace", t.trace_id.str()}, {"entries", t.entries.size()}});
      return kExitOk;
    });
    trace->add_option("file", o->file)->required()->check(CLI::ExistingFile);

    auto* reg = command(*model, "register", "Register a model file and manifest", [this, o] {
      const ModelManifest fields =
          manifest_fields_from_json(parse_json(read_file(o->manifest), o->manifest));
      const ModelManifest m = registry().register_model(read_file(o->file), fields);
      Json j = model_manifest_to_json(m);
      j["manifest_id"] = m.manifest_id.str();
      emit(out_, j);
      return kExitOk;
    });
    reg->add_option("--model-file", o->file)->required()->check(CLI::ExistingFile);
    reg->add_option("--manifest", o->manifest)->required()->check(CLI::ExistingFile);

    auto* verify = command(*model, "verify", "Compare a model file with its manifest", [this, o] {
      const bool ok =
          registry().verify_model_file(Digest::from_string(o->id), read_file(o->file));
      emit(out_, Json{{"manifest", Digest::from_string(o->id).str()},
                      {"model_file", Digest::of(read_file(o->file)).str()},
                      {"match", ok}});
      return ok ? kExitOk : kExitVerificationFailed;
    });
    verify->add_option("manifest", o->id)->required();
    verify->add_option("--model-file", o->file)->required()->check(CLI::ExistingFile);

    auto* audit = command(*model, "audit", "Audit every registered model", [this] {
      const auto findings = registry().audit();
      Json rows = Json::array();
      for (const auto& f : findings) {
        rows.push_back(Json{{"manifest", f.manifest_id.str()}, {"problem", f.problem}});
      }
      emit(out_, Json{{"pass", findings.empty()}, {"findings", std::move(rows)}});
      return findings.empty() ? kExitOk : kExitVerificationFailed;
    });
    (void)audit;

    auto* show = command(*model, "show", "Print a model manifest", [this, o] {
      const ModelManifest m = registry().manifest(Digest::from_string(o->id));
      Json j = model_manifest_to_json(m);
      j["manifest_id"] = m.manifest_id.str();
      emit(out_, j);
      return kExitOk;
    });
    show->add_option("manifest", o->id)->required();

    auto* compare = command(*model, "compare", "Reproduction check between two manifests",
                            [this, o] {
      const auto r =
          registry().verify_reproduction(Digest::from_string(o->id), Digest::from_string(o->other));
      emit(out_, Json{{"inputs_equal", r.inputs_equal},
                      {"outputs_equal", r.outputs_equal},
                      {"determinism_violation", r.determinism_violation()},
                      {"differing_fields", r.differing_fields}});
      return r.determinism_violation() ? kExitVerificationFailed : kExitOk;
    });
    compare->add_option("a", o->id)->required();
    compare->add_option("b", o->other)->required();
  }

  void add_eval() {
    auto* eval = app_.add_subcommand("eval", "Detection evaluation");
    eval->require_subcommand(1);
    auto* o = &opts_.eval;

    auto* run = command(*eval, "run", "Evaluate predictions against requirements", [this, o] {
      const RequirementSpec req = load_requirement_spec(o->requirements);
      const OperationalDomainSpec domain = load_domain_spec(o->domain);
      const PredictionSet set = resolve_predictions(repo(), o->predictions, o->dataset, o->model);
      const EvaluationReport report =
          run_evaluation(repo(), registry(), set.prediction_set_id, req, domain);
      for (const auto& w : report.warnings) err_ << "warning: " << w << "\n";
      if (csv_output(g_, false)) {
        out_ << requirements_csv(report.requirements);
      } else {
        Json j = evaluation_report_to_json(report);
        j["report_id"] = report.report_id.str();
        emit(out_, j);
      }
      for (const auto& row : report.requirements) {
        if (!row.pass) err_ << "requirement failed: " << row.name << "\n";
      }
      return report.pass ? kExitOk : kExitVerificationFailed;
    });
    run->add_option("--predictions", o->predictions, "JSON-lines file or stored digest")
        ->required();
    run->add_option("--dataset", o->dataset);
    run->add_option("--requirements", o->requirements)->required()->check(CLI::ExistingFile);
    run->add_option("--domain", o->domain)->required()->check(CLI::ExistingFile);
    run->add_option("--model", o->model, "Model manifest digest");

    auto* sens = command(*eval, "sensitivity", "AP per bin of one dimension", [this, o] {
      DomainDimension dim;
      if (!o->domain.empty()) {
        const OperationalDomainSpec spec = load_domain_spec(o->domain);
        const DomainDimension* found = spec.find(o->dimension);
        if (found == nullptr) {
          fail(ErrorCode::kInvalidArgument, "dimension " + o->dimension + " not in " + o->domain);
        }
        dim = *found;
      } else if (o->dimension == kIntruderRange) {
        dim = standard_range_dimension();
      } else {
        fail(ErrorCode::kInvalidArgument, "--domain is required for dimension " + o->dimension);
      }
      const PredictionSet set = resolve_predictions(repo(), o->predictions, o->dataset, o->model);
      const ResolvedDataset dataset = repo().resolve_dataset(set.dataset_id);
      const auto images = match_dataset(dataset, set, o->iou);
      const auto parts = sensitivity_by_partition(dataset, images, dim);
      if (!o->svg.empty()) write_file(o->svg, sensitivity_svg(parts, "AP by " + dim.name));
      if (csv_output(g_, true)) {
        out_ << sensitivity_csv(parts);
      } else {
        emit(out_, partitions_json(parts));
      }
      return kExitOk;
    });
    sens->add_option("--predictions", o->predictions)->required();
    sens->add_option("--dataset", o->dataset);
    sens->add_option("--dimension", o->dimension)->capture_default_str();
    sens->add_option("--domain", o->domain, "Domain spec holding the dimension");
    sens->add_option("--iou", o->iou)->capture_default_str();
    sens->add_option("--svg", o->svg, "Also write an SVG bar chart");
  }

  void add_stability() {
    auto* o = &opts_.eval;
    auto* sub = command(app_, "stability", "Per-sequence flicker analysis", [this, o] {
      const PredictionSet set = resolve_predictions(repo(), o->predictions, o->dataset, o->model);
      std::vector<std::string> warnings;
      const auto timelines =
          build_timelines(repo(), set, o->iou, o->operating_confidence, &warnings);
      for (const auto& w : warnings) err_ << "warning: " << w << "\n";
      const auto rows = flicker_analysis(timelines);
      if (csv_output(g_, true)) {
        out_ << stability_csv(rows);
      } else {
        emit(out_, stability_to_json(rows));
      }
      return kExitOk;
    });
    sub->add_option("--predictions", o->predictions)->required();
    sub->add_option("--dataset", o->dataset);
    sub->add_option("--iou", o->iou)->capture_default_str();
    sub->add_option("--operating-confidence", o->operating_confidence)->capture_default_str();
  }

  void add_synth() {
    auto* o = &opts_.synth;
    auto* sub = command(app_, "synth", "Generate a synthetic dataset and predictions", [this, o] {
      const SyntheticConfig config =
          o->config.empty() ? default_synthetic_config() : load_synthetic_config(o->config);
      const SyntheticResult result = generate(repo(), config, o->dataset);
      const std::string path =
          o->predictions_out.empty() ? o->dataset + ".predictions.jsonl" : o->predictions_out;
      write_file(path, result.predictions_jsonl);
      emit(out_, Json{{"dataset", result.dataset_id.str()},
                      {"prediction_set", result.predictions.prediction_set_id.str()},
                      {"predictions_file", path},
                      {"images", result.predictions.images.size()}});
      return kExitOk;
    });
    sub->add_option("--config", o->config, "Synthetic config (defaults built in)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dataset", o->dataset, "Dataset name")->required();
    sub->add_option("--predictions-out", o->predictions_out,
                    "Default: <dataset>.predictions.jsonl");
  }

  void add_report() {
    auto* o = &opts_.report;
    auto* sub = command(app_, "report", "Write a certification report bundle", [this, o] {
      const Digest id = Digest::from_string(o->evaluation);
      ReportOptions options;
      options.chart_dimension = o->chart_dimension;
      if (o->with_stability) {
        const EvaluationReport ev = load_evaluation_report(repo().store(), id);
        const PredictionSet set = load_predictions(repo().store(), ev.prediction_set_id);
        std::vector<std::string> warnings;
        options.stability = flicker_analysis(build_timelines(
            repo(), set, ev.iou_threshold, ev.operating_confidence, &warnings));
        for (const auto& w : warnings) err_ << "warning: " << w << "\n";
      }
      const ReportBundle bundle = generate_report(repo(), id, o->out, options);
      emit(out_, Json{{"bundle", bundle.bundle_digest.str()},
                      {"directory", bundle.directory.string()},
                      {"files", bundle.files}});
      return kExitOk;
    });
    sub->add_option("--evaluation", o->evaluation, "Evaluation report digest")->required();
    sub->add_option("--out", o->out, "Bundle directory")->required();
    sub->add_flag("--with-stability", o->with_stability, "Include flicker analysis");
    sub->add_option("--chart-dimension", o->chart_dimension);
  }

  void add_store() {
    auto* st = app_.add_subcommand("store", "Content store maintenance");
    st->require_subcommand(1);
    command(*st, "verify", "Re-hash every object and check references", [this] {
      Json corrupt = Json::array();
      for (const auto& d : store().verify()) corrupt.push_back(d.str());
      const auto dangling = repo().verify_references();
      const bool ok = corrupt.empty() && dangling.empty();
      emit(out_, Json{{"pass", ok}, {"integrity_violations", corrupt}, {"dangling", dangling}});
      return ok ? kExitOk : kExitVerificationFailed;
    });
    auto* report = command(*st, "verify-report", "Check a report bundle against the store",
                           [this] {
      const auto problems = verify_report_bundle(store(), opts_.report.out);
      emit(out_, Json{{"pass", problems.empty()}, {"problems", problems}});
      return problems.empty() ? kExitOk : kExitVerificationFailed;
    });
    report->add_option("directory", opts_.report.out)->required()->check(CLI::ExistingDirectory);
  }

  struct Options {
    struct {
      std::string file, camera_id, flight_id, capture_time, sequence_id;
      std::int64_t frame_index = -1, width = 0, height = 0;
    } ingest;
    struct {
      std::string file, author = "autolabel", created_at;
    } annotate;
    struct {
      std::string name, role, entries, ref, other, add, remove, out;
      std::vector<std::string> development;
    } dataset;
    struct {
      std::string dataset, domain, cross;
    } coverage;
    struct {
      std::string file, manifest, id, other;
    } model;
    struct {
      std::string predictions, dataset, requirements, domain, model, svg, dimension{kIntruderRange};
      double iou = kDefaultIouThreshold;
      double operating_confidence = 0.5;
    } eval;
    struct {
      std::string config, dataset, predictions_out;
    } synth;
    struct {
      std::string evaluation, out, chart_dimension;
      bool with_stability = false;
    } report;
  };

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_;
  Globals g_;
  Options opts_;
  std::function<int()> action_;
  std::unique_ptr<ContentStore> store_;
  std::optional<Repository> repo_;
  std::optional<Registry> registry_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace certkit::cli
