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

#include <random>

#include "certkit/error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace certkit {
namespace {

TrackTimeline timeline(const std::vector<int>& bits) {
  TrackTimeline tl{"seq", "", {}};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    tl.frames.push_back({static_cast<std::int64_t>(i), true, bits[i] == 1});
  }
  return tl;
}

TEST_CASE("flicker fixtures") {
  auto row = flicker_analysis(timeline({1, 1, 0, 1, 1}));
  CHECK(row.flicker_events == 1);
  CHECK(row.max_gap == 1);
  CHECK(row.detection_rate == doctest::Approx(0.8));
  CHECK(row.flicker_rate == doctest::Approx(0.25));

  row = flicker_analysis(timeline({0, 0, 1, 1, 1}));
  CHECK(row.flicker_events == 0);
  CHECK(row.max_gap == 0);
  CHECK(row.detection_rate == doctest::Approx(0.6));

  row = flicker_analysis(timeline({1, 0, 0, 1, 0, 1}));
  CHECK(row.flicker_events == 2);
  CHECK(row.max_gap == 2);

  row = flicker_analysis(timeline({1, 0, 0}));
  CHECK(row.flicker_events == 0);

  row = flicker_analysis(timeline({}));
  CHECK(row.n_gt_frames == 0);
  CHECK(row.flicker_rate == 0.0);
}

TEST_CASE("frames without ground truth are skipped") {
  TrackTimeline tl = timeline({1, 0, 1});
  tl.frames.insert(tl.frames.begin() + 1, TimelineFrame{10, false, false});
  tl.frames.push_back(TimelineFrame{11, false, false});
  const auto row = flicker_analysis(tl);
  CHECK(row.n_frames == 5);
  CHECK(row.n_gt_frames == 3);
  CHECK(row.flicker_events == 1);
  CHECK(row.flicker_rate == doctest::Approx(0.5));
}

std::vector<int> random_bits(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 40);
  std::bernoulli_distribution on(0.6);
  std::vector<int> bits(static_cast<std::size_t>(len(rng)));
  for (auto& b : bits) b = on(rng) ? 1 : 0;
  return bits;
}

TEST_CASE("flicker counts agree with the reference") {
  std::mt19937_64 rng(808);
  for (int i = 0; i < 1000; ++i) {
    const auto bits = random_bits(rng);
    const auto row = flicker_analysis(timeline(bits));
    CHECK(row.flicker_events == oracle::flicker_events(bits));
    CHECK(row.max_gap == oracle::max_gap(bits));
  }
}

TEST_CASE("flicker counts are reversal symmetric") {
  std::mt19937_64 rng(909);
  for (int i = 0; i < 1000; ++i) {
    auto bits = random_bits(rng);
    const auto forward = flicker_analysis(timeline(bits));
    std::reverse(bits.begin(), bits.end());
    const auto backward = flicker_analysis(timeline(bits));
    CHECK(forward.flicker_events == backward.flicker_events);
    CHECK(forward.max_gap == backward.max_gap);
  }
}

TEST_CASE("concatenated fully detected runs never flicker") {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> len(1, 20);
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> bits(static_cast<std::size_t>(len(rng) + len(rng)), 1);
    const auto row = flicker_analysis(timeline(bits));
    CHECK(row.flicker_events == 0);
    CHECK(row.detection_rate == 1.0);
  }
}

ResolvedEntry frame(std::uint32_t tag, const std::string& seq, std::int64_t index,
                    std::vector<BoundingBox> boxes) {
  ImageInfo info = testing::image_info("F0");
  info.sequence_id = seq;
  info.frame_index = index;
  return testing::entry(tag, std::move(boxes), {}, info);
}

PredictionSet hits(const ResolvedDataset& ds, const std::vector<bool>& detect) {
  PredictionSet set{Digest::of("p"), ds.manifest.dataset_id, std::nullopt, {}};
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    std::vector<Detection> dets;
    if (detect[i]) dets.push_back({BoxGeometry{10, 10, 20, 10}, "aircraft", 0.9});
    set.images.push_back({ds.entries[i].image.image_digest, dets});
  }
  return set;
}

TEST_CASE("timelines from a dataset") {
  SUBCASE("fully detected sequence") {
    std::vector<ResolvedEntry> entries;
    for (std::uint32_t k = 0; k < 5; ++k) {
      entries.push_back(frame(k, "s1", k, {testing::ranged_box(500)}));
    }
    const auto ds = testing::dataset(entries);
    const auto images = match_dataset(ds, hits(ds, std::vector<bool>(5, true)), 0.5);
    const auto tls = build_timelines(ds, images, 0.5);
    REQUIRE(tls.size() == 1);
    const auto row = flicker_analysis(tls[0]);
    CHECK(row.n_gt_frames == 5);
    CHECK(row.flicker_events == 0);
    CHECK(row.detection_rate == 1.0);
  }
  SUBCASE("frames are ordered by index, sequences kept apart") {
    const auto ds = testing::dataset({
        frame(1, "b", 2, {testing::ranged_box(500)}),
        frame(2, "a", 1, {testing::ranged_box(500)}),
        frame(3, "b", 0, {testing::ranged_box(500)}),
        frame(4, "a", 0, {testing::ranged_box(500)}),
        frame(5, "b", 1, {testing::ranged_box(500)}),
    });
    const auto images = match_dataset(ds, hits(ds, {true, true, true, false, false}), 0.5);
    const auto rows = flicker_analysis(build_timelines(ds, images, 0.5));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sequence_id == "a");
    CHECK(rows[0].flicker_events == 0);
    CHECK(rows[0].detection_rate == 0.5);
    CHECK(rows[1].sequence_id == "b");
    CHECK(rows[1].flicker_events == 1);  // frames 0,1,2 -> 1,0,1
  }
  SUBCASE("detections below the operating confidence do not count") {
    const auto ds = testing::dataset({frame(1, "s", 0, {testing::ranged_box(500)}),
                                      frame(2, "s", 1, {testing::ranged_box(500)}),
                                      frame(3, "s", 2, {testing::ranged_box(500)})});
    auto set = hits(ds, {true, true, true});
    set.images[1].detections[0].confidence = 0.2;
    const auto rows = flicker_analysis(build_timelines(ds, match_dataset(ds, set, 0.5), 0.5));
    CHECK(rows[0].flicker_events == 1);
  }
  SUBCASE("no sequence metadata") {
    const auto ds = testing::dataset({testing::entry(1, {testing::ranged_box(500)})});
    std::vector<std::string> warnings;
    const auto images = match_dataset(ds, hits(ds, {true}), 0.5);
    CHECK(build_timelines(ds, images, 0.5, &warnings).empty());
    CHECK(warnings.size() == 1);
  }
  SUBCASE("duplicate frame index") {
    const auto ds = testing::dataset({frame(1, "s", 0, {}), frame(2, "s", 0, {})});
    const auto images = match_dataset(ds, hits(ds, {false, false}), 0.5);
    CHECK_THROWS_AS(build_timelines(ds, images, 0.5), Error);
  }
}

TEST_CASE("stability csv") {
  const std::vector<StabilityRow> rows{flicker_analysis(timeline({1, 0, 1}))};
  CHECK(stability_csv(rows) ==
        "sequence_id,track,n_frames,n_gt_frames,detection_rate,flicker_events,max_gap,"
        "flicker_rate\nseq,,3,3,0.6666666666666666,1,1,0.5\n");
}

}  // namespace
}  // namespace certkit
