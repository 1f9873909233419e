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

#include <benchmark/benchmark.h>

#include <random>

#include "certkit/evaluation.hpp"

namespace certkit {
namespace {

std::vector<GroundTruthBox> make_ground_truth(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0.0, 600.0);
  std::uniform_real_distribution<double> size(4.0, 60.0);
  std::vector<GroundTruthBox> gt;
  for (int i = 0; i < n; ++i) {
    gt.push_back({BoxGeometry{pos(rng), pos(rng), size(rng), size(rng)}, "aircraft"});
  }
  return gt;
}

std::vector<Detection> make_detections(std::mt19937_64& rng,
                                       const std::vector<GroundTruthBox>& gt, int n) {
  std::uniform_real_distribution<double> noise(-3.0, 3.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    BoxGeometry b = gt[static_cast<std::size_t>(i) % gt.size()].box;
    b.x += noise(rng);
    b.y += noise(rng);
    dets.push_back({b, "aircraft", conf(rng)});
  }
  return dets;
}

void BM_Iou(benchmark::State& state) {
  const BoxGeometry a{10, 10, 40, 30};
  BoxGeometry b{25, 18, 40, 30};
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(a, b));
    b.x += 1e-9;
  }
}
BENCHMARK(BM_Iou);

void BM_MatchDetections(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const auto gt = make_ground_truth(rng, n);
  const auto dets = make_detections(rng, gt, 2 * n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_detections(gt, dets, 0.5));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_MatchDetections)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_AveragePrecision(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::bernoulli_distribution tp(0.6);
  std::vector<ScoredDetection> dets(static_cast<std::size_t>(state.range(0)));
  std::size_t n_tp = 0;
  for (auto& d : dets) {
    d = {conf(rng), tp(rng)};
    n_tp += d.true_positive ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(average_precision(pr_curve(dets, n_tp + 1)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AveragePrecision)->RangeMultiplier(8)->Range(64, 1 << 16)->Complexity();

}  // namespace
}  // namespace certkit
