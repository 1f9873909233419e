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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "certkit/error.hpp"

namespace certkit {
namespace {

constexpr std::string_view kPredictionSetType = "certkit.prediction-set.v1";
constexpr std::string_view kRequirementSpecType = "certkit.requirement-spec.v1";
constexpr std::string_view kReportType = "certkit.evaluation-report.v1";

// Indices ordered by descending confidence, ties by ascending index.
template <typename GetConfidence>
std::vector<std::size_t> sweep_order(std::size_t n, GetConfidence confidence) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidence(a) > confidence(b);
  });
  return order;
}

void validate_detection(const Detection& d, std::string_view where) {
  const auto& b = d.box;
  for (double v : {b.x, b.y, b.w, b.h, d.confidence}) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kInvalidArgument, std::string(where) + ": values must be finite");
    }
  }
  if (b.w <= 0.0 || b.h <= 0.0) {
    fail(ErrorCode::kInvalidArgument,
         std::string(where) + ": detection width and height must be positive");
  }
  if (d.confidence < 0.0 || d.confidence > 1.0) {
    fail(ErrorCode::kInvalidArgument,
         std::string(where) + ": confidence " + format_decimal(d.confidence) +
             " outside [0, 1]");
  }
  if (d.class_label.empty()) {
    fail(ErrorCode::kInvalidArgument, std::string(where) + ": detection class is required");
  }
}

Detection detection_from_json(const Json& j, std::string_view where) {
  Detection d;
  d.box.x = json_real(require_field(j, "x", where), "x");
  d.box.y = json_real(require_field(j, "y", where), "y");
  d.box.w = json_real(require_field(j, "w", where), "w");
  d.box.h = json_real(require_field(j, "h", where), "h");
  d.class_label = json_string(require_field(j, "class", where), "class");
  d.confidence = json_real(require_field(j, "confidence", where), "confidence");
  validate_detection(d, where);
  return d;
}

Json detection_to_json(const Detection& d) {
  return Json{{"x", format_decimal(d.box.x)},
              {"y", format_decimal(d.box.y)},
              {"w", format_decimal(d.box.w)},
              {"h", format_decimal(d.box.h)},
              {"class", d.class_label},
              {"confidence", format_decimal(d.confidence)}};
}

// Bin for a sample value; kind mismatches and missing values are unbinned.
std::optional<std::size_t> quiet_bin(const DomainDimension& dim,
                                     const std::optional<AttributeValue>& value) {
  if (!value) return std::nullopt;
  if (std::holds_alternative<double>(*value) != (dim.kind == DimensionKind::kNumeric)) {
    return std::nullopt;
  }
  return bin_of(dim, *value);
}

enum class Outcome { kTruePositive, kFalsePositive, kIgnored };

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

std::optional<double> read_optional_real(const Json& j, std::string_view key) {
  if (const Json* v = optional_field(j, key)) return json_real(*v, key);
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Prediction sets

PredictionSet parse_predictions(std::istream& in, const Digest& dataset_id,
                                const std::optional<Digest>& model_manifest) {
  PredictionSet set{Digest::of(""), dataset_id, model_manifest, {}};
  std::set<Digest> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "predictions line " + std::to_string(line_no);
    try {
      const Json j = parse_json(line, where);
      ImagePredictions ip{
          Digest::from_string(json_string(require_field(j, "image", where), "image")), {}};
      if (!seen.insert(ip.image_digest).second) {
        fail(ErrorCode::kInvalidArgument, "image listed twice");
      }
      if (const Json* dets = optional_field(j, "detections")) {
        if (!dets->is_array()) fail(ErrorCode::kInvalidArgument, "detections must be a list");
        for (const Json& d : *dets) ip.detections.push_back(detection_from_json(d, "detection"));
      }
      set.images.push_back(std::move(ip));
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.what());
    }
  }
  std::sort(set.images.begin(), set.images.end(),
            [](const auto& a, const auto& b) { return a.image_digest < b.image_digest; });
  set.prediction_set_id = Digest::of(canonical_dump(prediction_set_to_json(set)));
  return set;
}

Json prediction_set_to_json(const PredictionSet& set) {
  Json images = Json::array();
  for (const auto& ip : set.images) {
    Json dets = Json::array();
    for (const auto& d : ip.detections) dets.push_back(detection_to_json(d));
    images.push_back(Json{{"image", ip.image_digest.str()}, {"detections", std::move(dets)}});
  }
  Json out{{"type", kPredictionSetType},
           {"dataset", set.dataset_id.str()},
           {"images", std::move(images)}};
  if (set.model_manifest) out["model_manifest"] = set.model_manifest->str();
  return out;
}

PredictionSet prediction_set_from_json(const Json& json, const Digest& id) {
  if (json_string(require_field(json, "type", "prediction set"), "type") != kPredictionSetType) {
    fail(ErrorCode::kInvalidArgument, "prediction set: unexpected type");
  }
  PredictionSet set{id,
                    Digest::from_string(json_string(
                        require_field(json, "dataset", "prediction set"), "dataset")),
                    std::nullopt,
                    {}};
  if (const Json* m = optional_field(json, "model_manifest")) {
    set.model_manifest = Digest::from_string(json_string(*m, "model_manifest"));
  }
  for (const Json& ij : require_field(json, "images", "prediction set")) {
    ImagePredictions ip{
        Digest::from_string(json_string(require_field(ij, "image", "predictions"), "image")), {}};
    for (const Json& d : require_field(ij, "detections", "predictions")) {
      ip.detections.push_back(detection_from_json(d, "detection"));
    }
    set.images.push_back(std::move(ip));
  }
  return set;
}

std::string predictions_to_jsonl(const PredictionSet& set) {
  std::string out;
  for (const auto& ip : set.images) {
    Json dets = Json::array();
    for (const auto& d : ip.detections) {
      dets.push_back(Json{{"x", d.box.x},
                          {"y", d.box.y},
                          {"w", d.box.w},
                          {"h", d.box.h},
                          {"class", d.class_label},
                          {"confidence", d.confidence}});
    }
    out += Json{{"image", ip.image_digest.hex()}, {"detections", std::move(dets)}}.dump();
    out += '\n';
  }
  return out;
}

Digest store_predictions(ContentStore& store, const PredictionSet& set) {
  return store.put(canonical_dump(prediction_set_to_json(set)), ObjectKind::kPredictionSet);
}

PredictionSet load_predictions(const ContentStore& store, const Digest& id) {
  return prediction_set_from_json(parse_json(store.get(id), "prediction set"), id);
}

// ---------------------------------------------------------------------------
// Matching and precision/recall

double iou(const BoxGeometry& a, const BoxGeometry& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::size_t MatchResult::match_count() const {
  return static_cast<std::size_t>(
      std::count_if(detections.begin(), detections.end(),
                    [](const DetectionMatch& m) { return m.ground_truth.has_value(); }));
}

MatchResult match_detections(std::span<const GroundTruthBox> ground_truth,
                             std::span<const Detection> detections, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "IOU threshold must lie in (0, 1]");
  }
  MatchResult result{std::vector<DetectionMatch>(detections.size()),
                     std::vector<bool>(ground_truth.size(), false)};
  const auto order = sweep_order(detections.size(),
                                 [&](std::size_t i) { return detections[i].confidence; });
  for (std::size_t d : order) {
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (result.ground_truth_matched[g] ||
          ground_truth[g].class_label != detections[d].class_label) {
        continue;
      }
      const double v = iou(detections[d].box, ground_truth[g].box);
      if (!best || v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    result.detections[d].iou = best_iou;
    if (best && best_iou >= iou_threshold) {
      result.detections[d].ground_truth = best;
      result.ground_truth_matched[*best] = true;
    }
  }
  return result;
}

PRCurve pr_curve(std::span<const ScoredDetection> detections, std::size_t n_groundtruth) {
  if (n_groundtruth == 0) {
    fail(ErrorCode::kInvalidArgument, "no ground truth: average precision is undefined");
  }
  PRCurve curve{{}, n_groundtruth, detections.size()};
  curve.points.reserve(detections.size());
  const auto order = sweep_order(detections.size(),
                                 [&](std::size_t i) { return detections[i].confidence; });
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (detections[order[k]].true_positive) ++tp;
    curve.points.push_back(PRPoint{static_cast<double>(tp) / static_cast<double>(n_groundtruth),
                                   static_cast<double>(tp) / static_cast<double>(k + 1)});
  }
  return curve;
}

double average_precision(const PRCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0.0;
  // Envelope: running maximum of precision from the end of the sweep.
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t k = pts.size(); k-- > 0;) {
    running = std::max(running, pts[k].precision);
    envelope[k] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].recall > prev_recall) {
      ap += (pts[k].recall - prev_recall) * envelope[k];
      prev_recall = pts[k].recall;
    }
  }
  return std::clamp(ap, 0.0, 1.0);
}

std::vector<ImageEvaluation> match_dataset(const ResolvedDataset& dataset,
                                           const PredictionSet& predictions,
                                           double iou_threshold) {
  std::unordered_map<Digest, std::size_t> index;
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    index.emplace(dataset.entries[i].image.image_digest, i);
  }
  std::vector<const ImagePredictions*> per_entry(dataset.entries.size(), nullptr);
  for (const auto& ip : predictions.images) {
    auto it = index.find(ip.image_digest);
    if (it == index.end()) {
      fail(ErrorCode::kInvalidArgument, "prediction for image " + ip.image_digest.str() +
                                            " which is not in dataset " +
                                            dataset.manifest.dataset_id.str());
    }
    per_entry[it->second] = &ip;
  }
  std::vector<ImageEvaluation> out;
  out.reserve(dataset.entries.size());
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    ImageEvaluation ev;
    ev.entry_index = i;
    for (const auto& box : dataset.entries[i].annotation.boxes) {
      ev.ground_truth.push_back(GroundTruthBox{box.geometry, box.class_label});
    }
    if (per_entry[i] != nullptr) ev.detections = per_entry[i]->detections;
    ev.match = match_detections(ev.ground_truth, ev.detections, iou_threshold);
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<std::string> ground_truth_classes(std::span<const ImageEvaluation> images) {
  std::set<std::string> classes;
  for (const auto& ev : images) {
    for (const auto& g : ev.ground_truth) classes.insert(g.class_label);
  }
  return {classes.begin(), classes.end()};
}

PRCurve pr_curve(std::span<const ImageEvaluation> images, const std::string& class_label) {
  std::vector<ScoredDetection> scored;
  std::size_t n_gt = 0;
  for (const auto& ev : images) {
    for (const auto& g : ev.ground_truth) n_gt += g.class_label == class_label ? 1 : 0;
    for (std::size_t d = 0; d < ev.detections.size(); ++d) {
      if (ev.detections[d].class_label != class_label) continue;
      scored.push_back(ScoredDetection{ev.detections[d].confidence,
                                       ev.match.detections[d].ground_truth.has_value()});
    }
  }
  return pr_curve(scored, n_gt);
}

// ---------------------------------------------------------------------------
// Partitions

std::vector<PartitionResult> sensitivity_by_partition(const ResolvedDataset& dataset,
                                                      std::span<const ImageEvaluation> images,
                                                      const DomainDimension& dimension) {
  const std::size_t n_bins = dimension.bin_count();
  const std::vector<std::string> classes = ground_truth_classes(images);
  std::vector<PartitionResult> results;
  for (std::size_t bin = 0; bin < n_bins; ++bin) {
    PartitionResult r;
    r.dimension = dimension.name;
    r.bin = bin;
    r.label = dimension.bin_label(bin);
    if (dimension.kind == DimensionKind::kNumeric) r.interval = dimension.intervals[bin];

    std::map<std::string, std::vector<ScoredDetection>> scored;
    std::map<std::string, std::size_t> n_gt;
    for (const auto& ev : images) {
      const ResolvedEntry& entry = dataset.entries.at(ev.entry_index);
      // Which ground-truth boxes of this image belong to the bin.
      std::vector<bool> in_bin(ev.ground_truth.size(), false);
      bool image_in_bin = false;
      if (dimension.unit == SamplingUnit::kBox) {
        for (std::size_t g = 0; g < ev.ground_truth.size(); ++g) {
          in_bin[g] = quiet_bin(dimension, box_value(entry, entry.annotation.boxes[g],
                                                     dimension.name)) == bin;
          image_in_bin = image_in_bin || in_bin[g];
        }
      } else {
        image_in_bin = quiet_bin(dimension, image_value(entry, dimension.name)) == bin;
        in_bin.assign(ev.ground_truth.size(), image_in_bin);
      }
      if (!image_in_bin) continue;
      ++r.n_images;
      for (std::size_t g = 0; g < ev.ground_truth.size(); ++g) {
        if (in_bin[g]) ++n_gt[ev.ground_truth[g].class_label];
      }
      for (std::size_t d = 0; d < ev.detections.size(); ++d) {
        const auto& m = ev.match.detections[d];
        Outcome outcome = Outcome::kFalsePositive;
        if (m.ground_truth) {
          outcome = in_bin[*m.ground_truth] ? Outcome::kTruePositive : Outcome::kIgnored;
        }
        if (outcome == Outcome::kIgnored) continue;
        scored[ev.detections[d].class_label].push_back(
            ScoredDetection{ev.detections[d].confidence, outcome == Outcome::kTruePositive});
      }
    }
    std::vector<double> aps;
    for (const auto& cls : classes) {
      const std::size_t count = n_gt[cls];
      r.n_gt += count;
      if (count == 0) continue;
      aps.push_back(average_precision(pr_curve(scored[cls], count)));
    }
    if (!aps.empty()) r.ap = mean(aps);
    results.push_back(std::move(r));
  }
  return results;
}

// ---------------------------------------------------------------------------
// Requirements

RequirementSpec parse_requirement_spec(const Json& json) {
  if (const Json* type = optional_field(json, "type")) {
    if (json_string(*type, "type") != kRequirementSpecType) {
      fail(ErrorCode::kInvalidArgument, "requirement spec: unexpected type");
    }
  }
  RequirementSpec spec{Digest::of(""), kDefaultIouThreshold, 0.5, {}, {}, {}, {}, {}};
  if (const Json* v = optional_field(json, "iou_threshold")) {
    spec.iou_threshold = json_real(*v, "iou_threshold");
  }
  if (const Json* v = optional_field(json, "operating_confidence")) {
    spec.operating_confidence = json_real(*v, "operating_confidence");
  }
  spec.min_map = read_optional_real(json, "min_map");
  spec.max_fp_per_image = read_optional_real(json, "max_fp_per_image");
  spec.max_fn_rate = read_optional_real(json, "max_fn_rate");
  if (const Json* parts = optional_field(json, "partitions")) {
    for (const Json& p : *parts) {
      PartitionRequirement pr;
      pr.dimension = json_string(require_field(p, "dimension", "partition"), "dimension");
      const Json& bin = require_field(p, "bin", "partition");
      if (bin.is_string()) {
        pr.bin = bin.get<std::string>();
      } else {
        const auto idx = json_int(bin, "bin");
        if (idx < 0) fail(ErrorCode::kInvalidArgument, "partition bin index must be >= 0");
        pr.bin = static_cast<std::size_t>(idx);
      }
      pr.min_ap = json_real(require_field(p, "min_ap", "partition"), "min_ap");
      spec.partitions.push_back(std::move(pr));
    }
  }
  if (const Json* role = optional_field(json, "required_role")) {
    spec.required_role = role_from_name(json_string(*role, "required_role"));
  }
  if (!(spec.iou_threshold > 0.0 && spec.iou_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "requirement spec: iou_threshold must lie in (0, 1]");
  }
  if (spec.operating_confidence < 0.0 || spec.operating_confidence > 1.0) {
    fail(ErrorCode::kInvalidArgument,
         "requirement spec: operating_confidence must lie in [0, 1]");
  }
  if (!spec.min_map && !spec.max_fp_per_image && !spec.max_fn_rate && spec.partitions.empty()) {
    fail(ErrorCode::kInvalidArgument, "requirement spec: at least one criterion is required");
  }
  spec.spec_id = Digest::of(canonical_dump(requirement_spec_to_json(spec)));
  return spec;
}

RequirementSpec load_requirement_spec(const std::filesystem::path& path) {
  return parse_requirement_spec(parse_json(read_file(path), path.string()));
}

Json requirement_spec_to_json(const RequirementSpec& spec) {
  Json out{{"type", kRequirementSpecType},
           {"iou_threshold", format_decimal(spec.iou_threshold)},
           {"operating_confidence", format_decimal(spec.operating_confidence)}};
  if (spec.min_map) out["min_map"] = format_decimal(*spec.min_map);
  if (spec.max_fp_per_image) out["max_fp_per_image"] = format_decimal(*spec.max_fp_per_image);
  if (spec.max_fn_rate) out["max_fn_rate"] = format_decimal(*spec.max_fn_rate);
  if (!spec.partitions.empty()) {
    Json parts = Json::array();
    for (const auto& p : spec.partitions) {
      Json j{{"dimension", p.dimension}, {"min_ap", format_decimal(p.min_ap)}};
      if (const auto* idx = std::get_if<std::size_t>(&p.bin)) {
        j["bin"] = *idx;
      } else {
        j["bin"] = std::get<std::string>(p.bin);
      }
      parts.push_back(std::move(j));
    }
    out["partitions"] = std::move(parts);
  }
  if (spec.required_role) out["required_role"] = role_name(*spec.required_role);
  return out;
}

OverallMetrics overall_metrics(std::span<const ImageEvaluation> images, std::size_t n_images,
                               double operating_confidence) {
  OverallMetrics m;
  m.n_images = n_images;
  std::size_t fp = 0;
  std::size_t tp = 0;
  for (const auto& ev : images) {
    m.n_gt += ev.ground_truth.size();
    m.n_detections += ev.detections.size();
    for (std::size_t d = 0; d < ev.detections.size(); ++d) {
      if (ev.detections[d].confidence < operating_confidence) continue;
      if (ev.match.detections[d].ground_truth) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  m.fp_per_image = n_images > 0 ? static_cast<double>(fp) / static_cast<double>(n_images) : 0.0;
  m.fn_rate = m.n_gt > 0 ? static_cast<double>(m.n_gt - tp) / static_cast<double>(m.n_gt) : 0.0;
  std::vector<double> aps;
  for (const auto& cls : ground_truth_classes(images)) {
    const double ap = average_precision(pr_curve(images, cls));
    m.ap_per_class[cls] = ap;
    aps.push_back(ap);
  }
  if (!aps.empty()) m.map = mean(aps);
  return m;
}

std::vector<RequirementRow> check_requirements(const OverallMetrics& overall,
                                               std::span<const PartitionResult> partitions,
                                               const RequirementSpec& spec) {
  std::vector<RequirementRow> rows;
  if (spec.min_map) {
    if (!overall.map) {
      fail(ErrorCode::kInvalidArgument, "min_map: no ground truth, mAP is undefined");
    }
    rows.push_back({"min_map", *spec.min_map, *overall.map, *overall.map >= *spec.min_map});
  }
  if (spec.max_fp_per_image) {
    rows.push_back({"max_fp_per_image", *spec.max_fp_per_image, overall.fp_per_image,
                    overall.fp_per_image <= *spec.max_fp_per_image});
  }
  if (spec.max_fn_rate) {
    rows.push_back({"max_fn_rate", *spec.max_fn_rate, overall.fn_rate,
                    overall.fn_rate <= *spec.max_fn_rate});
  }
  for (const auto& req : spec.partitions) {
    const PartitionResult* found = nullptr;
    for (const auto& p : partitions) {
      if (p.dimension != req.dimension) continue;
      const auto* idx = std::get_if<std::size_t>(&req.bin);
      if ((idx && p.bin == *idx) || (!idx && p.label == std::get<std::string>(req.bin))) {
        found = &p;
        break;
      }
    }
    const std::string bin_text = std::holds_alternative<std::size_t>(req.bin)
                                     ? std::to_string(std::get<std::size_t>(req.bin))
                                     : std::get<std::string>(req.bin);
    if (found == nullptr) {
      fail(ErrorCode::kInvalidArgument,
           "partition absent: " + req.dimension + " bin " + bin_text + " is not in the report");
    }
    if (!found->ap) {
      fail(ErrorCode::kInvalidArgument, "partition absent: " + req.dimension + " " +
                                            found->label + " has no ground truth");
    }
    rows.push_back({"min_ap:" + req.dimension + ":" + found->label, req.min_ap, *found->ap,
                    *found->ap >= req.min_ap});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

Json evaluation_report_to_json(const EvaluationReport& r) {
  Json ap = Json::object();
  for (const auto& [cls, v] : r.overall.ap_per_class) ap[cls] = format_decimal(v);
  Json overall{{"ap_per_class", std::move(ap)},
               {"fp_per_image", format_decimal(r.overall.fp_per_image)},
               {"fn_rate", format_decimal(r.overall.fn_rate)},
               {"n_images", r.overall.n_images},
               {"n_gt", r.overall.n_gt},
               {"n_detections", r.overall.n_detections}};
  if (r.overall.map) overall["map"] = format_decimal(*r.overall.map);
  Json parts = Json::array();
  for (const auto& p : r.partitions) {
    Json j{{"dimension", p.dimension},
           {"bin", p.bin},
           {"label", p.label},
           {"n_gt", p.n_gt},
           {"n_images", p.n_images}};
    if (p.ap) j["ap"] = format_decimal(*p.ap);
    if (p.interval) {
      j["lo"] = format_decimal(p.interval->lo);
      j["hi"] = format_decimal(p.interval->hi);
    }
    parts.push_back(std::move(j));
  }
  Json reqs = Json::array();
  for (const auto& row : r.requirements) {
    reqs.push_back(Json{{"name", row.name},
                        {"threshold", format_decimal(row.threshold)},
                        {"observed", format_decimal(row.observed)},
                        {"pass", row.pass}});
  }
  Json out{{"type", kReportType},
           {"prediction_set", r.prediction_set_id.str()},
           {"dataset", r.dataset_id.str()},
           {"domain_spec", r.domain_spec_id.str()},
           {"requirement_spec", r.requirement_spec_id.str()},
           {"iou_threshold", format_decimal(r.iou_threshold)},
           {"operating_confidence", format_decimal(r.operating_confidence)},
           {"overall", std::move(overall)},
           {"partitions", std::move(parts)},
           {"requirements", std::move(reqs)},
           {"pass", r.pass},
           {"warnings", r.warnings}};
  if (r.model_manifest) out["model_manifest"] = r.model_manifest->str();
  return out;
}

EvaluationReport evaluation_report_from_json(const Json& json, const Digest& report_id) {
  constexpr std::string_view what = "evaluation report";
  if (json_string(require_field(json, "type", what), "type") != kReportType) {
    fail(ErrorCode::kInvalidArgument, "evaluation report: unexpected type");
  }
  auto digest = [&](std::string_view key) {
    return Digest::from_string(json_string(require_field(json, key, what), key));
  };
  EvaluationReport r{report_id,
                     digest("prediction_set"),
                     digest("dataset"),
                     std::nullopt,
                     digest("domain_spec"),
                     digest("requirement_spec"),
                     json_real(require_field(json, "iou_threshold", what), "iou_threshold"),
                     json_real(require_field(json, "operating_confidence", what),
                               "operating_confidence"),
                     {}, {}, {}, false, {}};
  if (const Json* m = optional_field(json, "model_manifest")) {
    r.model_manifest = Digest::from_string(json_string(*m, "model_manifest"));
  }
  const Json& o = require_field(json, "overall", what);
  for (const auto& [cls, v] : require_field(o, "ap_per_class", what).items()) {
    r.overall.ap_per_class[cls] = json_real(v, cls);
  }
  r.overall.map = read_optional_real(o, "map");
  r.overall.fp_per_image = json_real(require_field(o, "fp_per_image", what), "fp_per_image");
  r.overall.fn_rate = json_real(require_field(o, "fn_rate", what), "fn_rate");
  r.overall.n_images = static_cast<std::size_t>(json_int(require_field(o, "n_images", what), "n_images"));
  r.overall.n_gt = static_cast<std::size_t>(json_int(require_field(o, "n_gt", what), "n_gt"));
  r.overall.n_detections =
      static_cast<std::size_t>(json_int(require_field(o, "n_detections", what), "n_detections"));
  for (const Json& p : require_field(json, "partitions", what)) {
    PartitionResult pr;
    pr.dimension = json_string(require_field(p, "dimension", what), "dimension");
    pr.bin = static_cast<std::size_t>(json_int(require_field(p, "bin", what), "bin"));
    pr.label = json_string(require_field(p, "label", what), "label");
    pr.ap = read_optional_real(p, "ap");
    pr.n_gt = static_cast<std::size_t>(json_int(require_field(p, "n_gt", what), "n_gt"));
    pr.n_images = static_cast<std::size_t>(json_int(require_field(p, "n_images", what), "n_images"));
    if (const Json* lo = optional_field(p, "lo")) {
      pr.interval = Interval{json_real(*lo, "lo"), json_real(require_field(p, "hi", what), "hi")};
    }
    r.partitions.push_back(std::move(pr));
  }
  for (const Json& row : require_field(json, "requirements", what)) {
    r.requirements.push_back(
        RequirementRow{json_string(require_field(row, "name", what), "name"),
                       json_real(require_field(row, "threshold", what), "threshold"),
                       json_real(require_field(row, "observed", what), "observed"),
                       require_field(row, "pass", what).get<bool>()});
  }
  r.pass = require_field(json, "pass", what).get<bool>();
  for (const Json& w : require_field(json, "warnings", what)) {
    r.warnings.push_back(json_string(w, "warning"));
  }
  return r;
}

EvaluationReport evaluate(const ResolvedDataset& dataset, const PredictionSet& predictions,
                          const RequirementSpec& requirements,
                          const OperationalDomainSpec& domain, const ModelManifest* model) {
  const Digest& dataset_id = dataset.manifest.dataset_id;
  if (predictions.dataset_id != dataset_id) {
    fail(ErrorCode::kInvalidArgument, "prediction set " + predictions.prediction_set_id.str() +
                                          " was made for dataset " +
                                          predictions.dataset_id.str() + ", not " +
                                          dataset_id.str());
  }
  if (requirements.required_role && *requirements.required_role != dataset.manifest.role) {
    fail(ErrorCode::kInvalidArgument,
         "requirements demand a " + std::string(role_name(*requirements.required_role)) +
             " dataset but " + dataset_id.str() + " has role " +
             std::string(role_name(dataset.manifest.role)));
  }
  EvaluationReport report{predictions.prediction_set_id,
                          predictions.prediction_set_id,
                          dataset_id,
                          predictions.model_manifest,
                          domain.spec_id,
                          requirements.spec_id,
                          requirements.iou_threshold,
                          requirements.operating_confidence,
                          {}, {}, {}, false, {}};
  if (model != nullptr) {
    const auto& train = model->train_datasets;
    if (std::find(train.begin(), train.end(), dataset_id) != train.end()) {
      report.warnings.push_back("evaluating on a dataset the model was trained on: " +
                                dataset_id.str());
    }
  }

  const auto images = match_dataset(dataset, predictions, requirements.iou_threshold);
  report.overall = overall_metrics(images, dataset.entries.size(),
                                   requirements.operating_confidence);
  for (const auto& dim : domain.dimensions) {
    auto parts = sensitivity_by_partition(dataset, images, dim);
    report.partitions.insert(report.partitions.end(), parts.begin(), parts.end());
  }
  report.requirements = check_requirements(report.overall, report.partitions, requirements);
  report.pass = std::all_of(report.requirements.begin(), report.requirements.end(),
                            [](const RequirementRow& r) { return r.pass; });
  report.report_id = Digest::of(canonical_dump(evaluation_report_to_json(report)));
  return report;
}

EvaluationReport run_evaluation(Repository& repo, const Registry& registry,
                                const Digest& prediction_set_id,
                                const RequirementSpec& requirements,
                                const OperationalDomainSpec& domain) {
  ContentStore& store = repo.store();
  const PredictionSet predictions = load_predictions(store, prediction_set_id);
  const ResolvedDataset dataset = repo.resolve_dataset(predictions.dataset_id);
  std::optional<ModelManifest> model;
  if (predictions.model_manifest) model = registry.manifest(*predictions.model_manifest);

  OperationalDomainSpec domain_copy = domain;
  domain_copy.spec_id =
      store.put(canonical_dump(domain_spec_to_json(domain)), ObjectKind::kDomainSpec);
  RequirementSpec requirements_copy = requirements;
  requirements_copy.spec_id = store.put(canonical_dump(requirement_spec_to_json(requirements)),
                                        ObjectKind::kRequirementSpec);
  EvaluationReport report = evaluate(dataset, predictions, requirements_copy, domain_copy,
                                     model ? &*model : nullptr);
  const Digest stored = store.put(canonical_dump(evaluation_report_to_json(report)),
                                  ObjectKind::kEvaluationReport);
  if (stored != report.report_id) {
    fail(ErrorCode::kIntegrityViolation, "evaluation report digest mismatch");
  }
  return report;
}

EvaluationReport load_evaluation_report(const ContentStore& store, const Digest& id) {
  return evaluation_report_from_json(parse_json(store.get(id), "evaluation report"), id);
}

}  // namespace certkit
