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

#include <cmath>
#include <random>

#include "certkit/evaluation.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace certkit {
namespace {

constexpr int kCases = 1000;

oracle::IntBox random_int_box(std::mt19937_64& rng, int extent = 40) {
  std::uniform_int_distribution<std::int64_t> pos(0, extent);
  std::uniform_int_distribution<std::int64_t> size(1, extent / 2);
  return {pos(rng), pos(rng), size(rng), size(rng)};
}

BoxGeometry geometry(const oracle::IntBox& b) {
  return {static_cast<double>(b.x), static_cast<double>(b.y), static_cast<double>(b.w),
          static_cast<double>(b.h)};
}

TEST_CASE("IOU agrees with exact rational arithmetic on integer boxes") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < kCases; ++i) {
    const auto a = random_int_box(rng);
    const auto b = random_int_box(rng);
    CHECK(iou(geometry(a), geometry(b)) == oracle::value(oracle::iou(a, b)));
  }
}

TEST_CASE("IOU symmetry, identity and translation invariance") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> pos(0.0, 600.0);
  std::uniform_real_distribution<double> size(0.5, 120.0);
  std::uniform_real_distribution<double> shift(-300.0, 300.0);
  for (int i = 0; i < kCases; ++i) {
    const BoxGeometry a{pos(rng), pos(rng), size(rng), size(rng)};
    const BoxGeometry b{a.x + shift(rng) / 10, a.y + shift(rng) / 10, size(rng), size(rng)};
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(iou(b, a) == v);
    CHECK(iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    const double dx = shift(rng);
    const double dy = shift(rng);
    const BoxGeometry a2{a.x + dx, a.y + dy, a.w, a.h};
    const BoxGeometry b2{b.x + dx, b.y + dy, b.w, b.h};
    CHECK(std::abs(iou(a2, b2) - v) <= 1e-9);
  }
}

std::vector<ScoredDetection> random_sweep(std::mt19937_64& rng, std::size_t* n_gt) {
  std::uniform_int_distribution<int> count(0, 30);
  std::uniform_int_distribution<int> level(0, 12);  // coarse levels force ties
  std::bernoulli_distribution tp(0.5);
  std::vector<ScoredDetection> dets(static_cast<std::size_t>(count(rng)));
  std::size_t tps = 0;
  for (auto& d : dets) {
    d.confidence = level(rng) / 12.0;
    d.true_positive = tp(rng);
    if (d.true_positive) ++tps;
  }
  std::uniform_int_distribution<std::size_t> extra(0, 5);
  *n_gt = std::max<std::size_t>(1, tps + extra(rng));
  return dets;
}

TEST_CASE("AP matches the exact reference") {
  std::mt19937_64 rng(303);
  for (int i = 0; i < kCases; ++i) {
    std::size_t n_gt = 0;
    const auto dets = random_sweep(rng, &n_gt);
    std::vector<oracle::Scored> ref;
    for (const auto& d : dets) ref.push_back({d.confidence, d.true_positive});
    const double expected =
        oracle::value(oracle::average_precision(ref, static_cast<std::int64_t>(n_gt)));
    const double ap = average_precision(pr_curve(dets, n_gt));
    CHECK(std::abs(ap - expected) <= 1e-9);
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);
  }
}

TEST_CASE("recall is non-decreasing along the sweep") {
  std::mt19937_64 rng(404);
  for (int i = 0; i < kCases; ++i) {
    std::size_t n_gt = 0;
    const auto dets = random_sweep(rng, &n_gt);
    const auto curve = pr_curve(dets, n_gt);
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
      CHECK(curve.points[k].recall >= curve.points[k - 1].recall);
    }
  }
}

struct RandomScene {
  std::vector<oracle::IntBox> gt_boxes;
  std::vector<std::string> gt_classes;
  std::vector<oracle::IntBox> det_boxes;
  std::vector<oracle::MatchInput> dets;
};

RandomScene random_scene(std::mt19937_64& rng) {
  static const char* kClasses[] = {"aircraft", "bird"};
  std::uniform_int_distribution<int> n(0, 8);
  std::uniform_int_distribution<int> cls(0, 1);
  std::uniform_int_distribution<int> level(0, 9);
  std::uniform_int_distribution<int> jitter(-4, 4);
  RandomScene s;
  const int n_gt = n(rng);
  for (int g = 0; g < n_gt; ++g) {
    s.gt_boxes.push_back(random_int_box(rng, 30));
    s.gt_classes.emplace_back(kClasses[cls(rng)]);
  }
  const int n_det = n(rng);
  for (int d = 0; d < n_det; ++d) {
    oracle::IntBox b = random_int_box(rng, 30);
    if (!s.gt_boxes.empty() && cls(rng) == 0) {
      b = s.gt_boxes[static_cast<std::size_t>(d) % s.gt_boxes.size()];
      b.x += jitter(rng);
      b.y += jitter(rng);
    }
    s.det_boxes.push_back(b);
    s.dets.push_back({level(rng) / 9.0, kClasses[cls(rng)]});
  }
  return s;
}

MatchResult library_match(const RandomScene& s, double threshold) {
  std::vector<GroundTruthBox> gt;
  for (std::size_t g = 0; g < s.gt_boxes.size(); ++g) {
    gt.push_back({geometry(s.gt_boxes[g]), s.gt_classes[g]});
  }
  std::vector<Detection> dets;
  for (std::size_t d = 0; d < s.dets.size(); ++d) {
    dets.push_back({geometry(s.det_boxes[d]), s.dets[d].class_label, s.dets[d].confidence});
  }
  return match_detections(gt, dets, threshold);
}

TEST_CASE("greedy matching agrees with the reference") {
  std::mt19937_64 rng(505);
  for (int i = 0; i < kCases; ++i) {
    const RandomScene s = random_scene(rng);
    for (double thr : {0.1, 0.5, 0.75}) {
      const auto expected = oracle::greedy_match(
          s.dets, s.gt_classes,
          [&](std::size_t d, std::size_t g) {
            return oracle::value(oracle::iou(s.det_boxes[d], s.gt_boxes[g]));
          },
          thr);
      const MatchResult m = library_match(s, thr);
      REQUIRE(m.detections.size() == expected.size());
      for (std::size_t d = 0; d < expected.size(); ++d) {
        CHECK(m.detections[d].ground_truth == expected[d]);
      }
    }
  }
}

TEST_CASE("match count never grows with the IOU threshold") {
  std::mt19937_64 rng(606);
  const double thresholds[] = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  for (int i = 0; i < kCases; ++i) {
    const RandomScene s = random_scene(rng);
    std::size_t previous = s.dets.size();
    for (double thr : thresholds) {
      const std::size_t count = library_match(s, thr).match_count();
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("AP is invariant under strictly increasing confidence relabelling") {
  std::mt19937_64 rng(707);
  for (int i = 0; i < kCases; ++i) {
    const RandomScene s = random_scene(rng);
    if (s.gt_boxes.empty()) continue;
    std::vector<BoundingBox> boxes;
    for (std::size_t g = 0; g < s.gt_boxes.size(); ++g) {
      boxes.push_back(testing::box(static_cast<double>(s.gt_boxes[g].x),
                                   static_cast<double>(s.gt_boxes[g].y),
                                   static_cast<double>(s.gt_boxes[g].w),
                                   static_cast<double>(s.gt_boxes[g].h), s.gt_classes[g]));
    }
    const auto ds = testing::dataset({testing::entry(1, boxes)});
    auto make_set = [&](auto&& relabel) {
      std::vector<Detection> dets;
      for (std::size_t d = 0; d < s.dets.size(); ++d) {
        dets.push_back({geometry(s.det_boxes[d]), s.dets[d].class_label,
                        relabel(s.dets[d].confidence)});
      }
      return PredictionSet{Digest::of("p"), ds.manifest.dataset_id, std::nullopt,
                           {ImagePredictions{ds.entries[0].image.image_digest, dets}}};
    };
    const auto base = make_set([](double c) { return c; });
    const auto warped = make_set([](double c) { return 0.01 + 0.9 * c * c * c; });
    const auto m1 = overall_metrics(match_dataset(ds, base, 0.5), 1, 0.5);
    const auto m2 = overall_metrics(match_dataset(ds, warped, 0.5), 1, 0.5);
    CHECK(m1.ap_per_class == m2.ap_per_class);
    CHECK(m1.map == m2.map);
  }
}

}  // namespace
}  // namespace certkit
