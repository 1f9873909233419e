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

#ifndef CERTKIT_STABILITY_HPP_
#define CERTKIT_STABILITY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "certkit/evaluation.hpp"

namespace certkit {

struct TimelineFrame {
  std::int64_t frame_index = 0;
  bool gt_present = false;
  bool detected = false;  // implies gt_present
};

struct TrackTimeline {
  std::string sequence_id;
  std::string track;  // callsign, or empty for the single-intruder case
  std::vector<TimelineFrame> frames;  // strictly increasing frame_index
};

struct StabilityRow {
  std::string sequence_id;
  std::string track;
  std::size_t n_frames = 0;
  std::size_t n_gt_frames = 0;
  double detection_rate = 0.0;
  std::size_t flicker_events = 0;
  std::size_t max_gap = 0;
  double flicker_rate = 0.0;
};

// A frame counts as detected when a ground-truth box of the track is matched
// by a detection with confidence >= operating_confidence. Images without a
// sequence_id are skipped; if no image has one the result is empty and a
// warning is appended.
std::vector<TrackTimeline> build_timelines(const ResolvedDataset& dataset,
                                           std::span<const ImageEvaluation> images,
                                           double operating_confidence,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<TrackTimeline> build_timelines(const Repository& repo,
                                           const PredictionSet& predictions,
                                           double iou_threshold, double operating_confidence,
                                           std::vector<std::string>* warnings = nullptr);

StabilityRow flicker_analysis(const TrackTimeline& timeline);
std::vector<StabilityRow> flicker_analysis(std::span<const TrackTimeline> timelines);

// sequence_id,track,n_frames,n_gt_frames,detection_rate,flicker_events,max_gap,flicker_rate
std::string stability_csv(std::span<const StabilityRow> rows);
Json stability_to_json(std::span<const StabilityRow> rows);

}  // namespace certkit

#endif  // CERTKIT_STABILITY_HPP_
