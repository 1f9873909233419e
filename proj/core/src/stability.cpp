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

#include "certkit/stability.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "certkit/csv.hpp"
#include "certkit/error.hpp"

namespace certkit {
namespace {

std::string track_of(const BoundingBox& box) {
  auto it = box.attributes.find(kCallsign);
  if (it == box.attributes.end()) return {};
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return format_decimal(std::get<double>(it->second));
}

}  // namespace

std::vector<TrackTimeline> build_timelines(const ResolvedDataset& dataset,
                                           std::span<const ImageEvaluation> images,
                                           double operating_confidence,
                                           std::vector<std::string>* warnings) {
  struct FrameState {
    std::map<std::string, std::pair<bool, bool>> tracks;  // track -> (gt, detected)
  };
  std::map<std::string, std::map<std::int64_t, FrameState>> sequences;
  for (const auto& ev : images) {
    const ResolvedEntry& entry = dataset.entries.at(ev.entry_index);
    const ImageInfo& info = entry.image.info;
    if (!info.sequence_id) continue;
    if (!info.frame_index) {
      fail(ErrorCode::kInvalidArgument, "image " + entry.image.image_digest.str() +
                                            " in sequence " + *info.sequence_id +
                                            " has no frame_index");
    }
    auto& frames = sequences[*info.sequence_id];
    auto [it, inserted] = frames.try_emplace(*info.frame_index);
    if (!inserted) {
      fail(ErrorCode::kInvalidArgument, "sequence " + *info.sequence_id +
                                            " has duplicate frame_index " +
                                            std::to_string(*info.frame_index));
    }
    for (std::size_t g = 0; g < ev.ground_truth.size(); ++g) {
      auto& state = it->second.tracks[track_of(entry.annotation.boxes[g])];
      state.first = true;
    }
    for (std::size_t d = 0; d < ev.detections.size(); ++d) {
      const auto& m = ev.match.detections[d];
      if (!m.ground_truth || ev.detections[d].confidence < operating_confidence) continue;
      it->second.tracks[track_of(entry.annotation.boxes[*m.ground_truth])].second = true;
    }
  }
  if (sequences.empty()) {
    if (warnings != nullptr) warnings->push_back("dataset has no sequence metadata");
    return {};
  }

  std::vector<TrackTimeline> out;
  for (const auto& [sequence_id, frames] : sequences) {
    std::set<std::string> tracks;
    for (const auto& [index, state] : frames) {
      for (const auto& [track, flags] : state.tracks) tracks.insert(track);
    }
    if (tracks.empty()) tracks.insert(std::string());
    for (const auto& track : tracks) {
      TrackTimeline tl{sequence_id, track, {}};
      for (const auto& [index, state] : frames) {
        TimelineFrame f{index, false, false};
        if (auto it = state.tracks.find(track); it != state.tracks.end()) {
          f.gt_present = it->second.first;
          f.detected = it->second.second;
        }
        tl.frames.push_back(f);
      }
      out.push_back(std::move(tl));
    }
  }
  return out;
}

std::vector<TrackTimeline> build_timelines(const Repository& repo,
                                           const PredictionSet& predictions,
                                           double iou_threshold, double operating_confidence,
                                           std::vector<std::string>* warnings) {
  const ResolvedDataset dataset = repo.resolve_dataset(predictions.dataset_id);
  const auto images = match_dataset(dataset, predictions, iou_threshold);
  return build_timelines(dataset, images, operating_confidence, warnings);
}

StabilityRow flicker_analysis(const TrackTimeline& timeline) {
  StabilityRow row{timeline.sequence_id, timeline.track, timeline.frames.size(), 0, 0.0, 0, 0,
                   0.0};
  std::size_t detected = 0;
  bool seen_detection = false;
  std::size_t gap = 0;
  for (const auto& f : timeline.frames) {
    if (!f.gt_present) continue;
    ++row.n_gt_frames;
    if (!f.detected) {
      ++gap;
      continue;
    }
    ++detected;
    // A gap counts only once a detection closes it and one preceded it.
    if (seen_detection && gap > 0) {
      ++row.flicker_events;
      row.max_gap = std::max(row.max_gap, gap);
    }
    seen_detection = true;
    gap = 0;
  }
  if (row.n_gt_frames > 0) {
    row.detection_rate =
        static_cast<double>(detected) / static_cast<double>(row.n_gt_frames);
  }
  const std::size_t transitions = row.n_gt_frames > 1 ? row.n_gt_frames - 1 : 1;
  row.flicker_rate =
      static_cast<double>(row.flicker_events) / static_cast<double>(transitions);
  return row;
}

std::vector<StabilityRow> flicker_analysis(std::span<const TrackTimeline> timelines) {
  std::vector<StabilityRow> rows;
  rows.reserve(timelines.size());
  for (const auto& tl : timelines) rows.push_back(flicker_analysis(tl));
  return rows;
}

std::string stability_csv(std::span<const StabilityRow> rows) {
  std::string out =
      "sequence_id,track,n_frames,n_gt_frames,detection_rate,flicker_events,max_gap,"
      "flicker_rate\n";
  for (const auto& r : rows) {
    out += csv_field(r.sequence_id) + "," + csv_field(r.track) + "," +
           std::to_string(r.n_frames) + "," + std::to_string(r.n_gt_frames) + "," +
           format_decimal(r.detection_rate) + "," + std::to_string(r.flicker_events) + "," +
           std::to_string(r.max_gap) + "," + format_decimal(r.flicker_rate) + "\n";
  }
  return out;
}

Json stability_to_json(std::span<const StabilityRow> rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"sequence_id", r.sequence_id},
                       {"track", r.track},
                       {"n_frames", r.n_frames},
                       {"n_gt_frames", r.n_gt_frames},
                       {"detection_rate", format_decimal(r.detection_rate)},
                       {"flicker_events", r.flicker_events},
                       {"max_gap", r.max_gap},
                       {"flicker_rate", format_decimal(r.flicker_rate)}});
  }
  return out;
}

}  // namespace certkit
