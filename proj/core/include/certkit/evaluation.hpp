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
#ifndef CERTKIT_EVALUATION_HPP_
#define CERTKIT_EVALUATION_HPP_

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "certkit/odd.hpp"
#include "certkit/registry.hpp"

namespace certkit {

inline constexpr double kDefaultIouThreshold = 0.5;

struct Detection {
  BoxGeometry box;
  std::string class_label;
  double confidence = 0.0;  // [0, 1]
};

struct ImagePredictions {
  Digest image_digest;
  std::vector<Detection> detections;  // input order is the tie-break order
};

struct PredictionSet {
  Digest prediction_set_id;
  Digest dataset_id;
  std::optional<Digest> model_manifest;
  std::vector<ImagePredictions> images;  // sorted by image digest
};

// Parses the line-oriented prediction import format:
//   {"image": "<digest>", "detections": [{"x":..,"y":..,"w":..,"h":..,
//    "class":"airplane","confidence":0.93}]}
PredictionSet parse_predictions(std::istream& in, const Digest& dataset_id,
                                const std::optional<Digest>& model_manifest);
Json prediction_set_to_json(const PredictionSet& set);
PredictionSet prediction_set_from_json(const Json& json, const Digest& id);
// Writes the set back out in the import format (one line per image).
std::string predictions_to_jsonl(const PredictionSet& set);

Digest store_predictions(ContentStore& store, const PredictionSet& set);
PredictionSet load_predictions(const ContentStore& store, const Digest& id);

// Intersection over union of two boxes with positive extent; 0 if disjoint.
double iou(const BoxGeometry& a, const BoxGeometry& b);

struct GroundTruthBox {
  BoxGeometry box;
  std::string class_label;
};

struct DetectionMatch {
  std::optional<std::size_t> ground_truth;
  // IOU with the matched box; for unmatched detections, the best IOU among
  // the same-class boxes still available when it was processed.
  double iou = 0.0;
};

struct MatchResult {
  std::vector<DetectionMatch> detections;  // indexed like the input
  std::vector<bool> ground_truth_matched;

  std::size_t match_count() const;
};

// Greedy matching in strictly descending confidence (ties: lower input index
// first). Each detection takes the unmatched same-class ground-truth box of
// highest IOU (ties: lower index) if that IOU reaches the threshold.
MatchResult match_detections(std::span<const GroundTruthBox> ground_truth,
                             std::span<const Detection> detections,
                             double iou_threshold);

// One detection entering the precision/recall sweep, listed in tie-break
// order (image order, then detection index).
struct ScoredDetection {
  double confidence = 0.0;
  bool true_positive = false;
};

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // one per detection, descending confidence
  std::size_t n_groundtruth = 0;
  std::size_t n_detections = 0;
};

// Throws Error(kInvalidArgument) when n_groundtruth is zero: AP is undefined
// for a class without ground truth.
PRCurve pr_curve(std::span<const ScoredDetection> detections,
                 std::size_t n_groundtruth);

// Exact area under the all-points interpolated precision envelope
// p(r) = max{precision_k : recall_k >= r} over r in [0, 1].
double average_precision(const PRCurve& curve);

// Ground truth, predictions and matching for one dataset entry.
struct ImageEvaluation {
  std::size_t entry_index = 0;  // into ResolvedDataset::entries
  std::vector<GroundTruthBox> ground_truth;
  std::vector<Detection> detections;
  MatchResult match;
};

// Throws Error(kInvalidArgument) when a prediction names an image that is
// not part of the dataset.
std::vector<ImageEvaluation> match_dataset(const ResolvedDataset& dataset,
                                           const PredictionSet& predictions,
                                           double iou_threshold);

// Sweep of every detection of the class across the dataset.
PRCurve pr_curve(std::span<const ImageEvaluation> images, const std::string& class_label);

// Classes with at least one ground-truth box, sorted.
std::vector<std::string> ground_truth_classes(std::span<const ImageEvaluation> images);

struct PartitionResult {
  std::string dimension;
  std::size_t bin = 0;
  std::string label;
  std::optional<Interval> interval;  // numeric dimensions
  std::optional<double> ap;          // absent when n_gt == 0
  std::size_t n_gt = 0;
  std::size_t n_images = 0;
};

// Per-bin AP. For box-unit dimensions a bin holds the ground-truth boxes
// whose value falls in it; only images containing such a box take part,
// detections matched to boxes outside the bin are ignored, and unmatched
// detections in those images count as false positives. For image-unit
// dimensions a bin holds whole images. With several classes the bin AP is
// the mean over classes that have ground truth in the bin.
std::vector<PartitionResult> sensitivity_by_partition(const ResolvedDataset& dataset,
                                                      std::span<const ImageEvaluation> images,
                                                      const DomainDimension& dimension);

struct PartitionRequirement {
  std::string dimension;
  std::variant<std::size_t, std::string> bin;  // index or bin label
  double min_ap = 0.0;
};

struct RequirementSpec {
  Digest spec_id;
  double iou_threshold = kDefaultIouThreshold;
  double operating_confidence = 0.5;
  std::optional<double> min_map;
  std::optional<double> max_fp_per_image;
  std::optional<double> max_fn_rate;
  std::vector<PartitionRequirement> partitions;
  std::optional<DatasetRole> required_role;
};

RequirementSpec parse_requirement_spec(const Json& json);
RequirementSpec load_requirement_spec(const std::filesystem::path& path);
Json requirement_spec_to_json(const RequirementSpec& spec);

struct OverallMetrics {
  std::map<std::string, double> ap_per_class;
  std::optional<double> map;  // mean of ap_per_class; absent without ground truth
  double fp_per_image = 0.0;
  double fn_rate = 0.0;
  std::size_t n_images = 0;
  std::size_t n_gt = 0;
  std::size_t n_detections = 0;
};

// Detection counts at the operating confidence plus AP/mAP from the full
// sweep.
OverallMetrics overall_metrics(std::span<const ImageEvaluation> images,
                               std::size_t n_images, double operating_confidence);

struct RequirementRow {
  std::string name;
  double threshold = 0.0;
  double observed = 0.0;
  bool pass = false;
};

// min_* criteria pass when observed >= threshold, max_* when observed <=
// threshold. Throws Error(kInvalidArgument) when a criterion has nothing to
// compare against (absent mAP, unknown or empty partition).
std::vector<RequirementRow> check_requirements(const OverallMetrics& overall,
                                               std::span<const PartitionResult> partitions,
                                               const RequirementSpec& spec);

struct EvaluationReport {
  Digest report_id;
  Digest prediction_set_id;
  Digest dataset_id;
  std::optional<Digest> model_manifest;
  Digest domain_spec_id;
  Digest requirement_spec_id;
  double iou_threshold = kDefaultIouThreshold;
  double operating_confidence = 0.5;
  OverallMetrics overall;
  std::vector<PartitionResult> partitions;
  std::vector<RequirementRow> requirements;
  bool pass = false;
  std::vector<std::string> warnings;
};

Json evaluation_report_to_json(const EvaluationReport& report);
EvaluationReport evaluation_report_from_json(const Json& json, const Digest& report_id);

// Pure evaluation; report_id is the digest of the canonical report. model may
// be null when the predictions are not tied to a registered model.
EvaluationReport evaluate(const ResolvedDataset& dataset, const PredictionSet& predictions,
                          const RequirementSpec& requirements,
                          const OperationalDomainSpec& domain, const ModelManifest* model);

// Loads everything from the store, evaluates, and stores the domain spec,
// requirement spec and report.
EvaluationReport run_evaluation(Repository& repo, const Registry& registry,
                                const Digest& prediction_set_id,
                                const RequirementSpec& requirements,
                                const OperationalDomainSpec& domain);
EvaluationReport load_evaluation_report(const ContentStore& store, const Digest& id);

}  // namespace certkit

#endif  // CERTKIT_EVALUATION_HPP_
