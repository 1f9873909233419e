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

#ifndef CERTKIT_SYNTHGEN_HPP_
#define CERTKIT_SYNTHGEN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "certkit/evaluation.hpp"

namespace certkit {

struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::int64_t n_encounters = 40;
  std::int64_t frames_per_encounter = 25;
  std::int64_t image_width = 64;
  std::int64_t image_height = 48;
  // Intruder range falls linearly from start to end within each encounter.
  double range_start_m = 1499.0;
  double range_end_m = 1.0;
  std::vector<Interval> bins;                // range bins of the detector model
  std::vector<double> detection_probability;  // one per bin
  Interval tp_confidence{0.3, 1.0};
  Interval fp_confidence{0.05, 0.6};
  double localization_noise_px = 0.3;
  double fp_rate_per_image = 0.05;
  std::string class_label = "aircraft";
  DatasetRole role = DatasetRole::kCertification;
};

// The four range bins 0-375, 375-750, 750-1115 and 1115-1500 m with
// detection probabilities 0.95, 0.85, 0.6 and 0.3.
SyntheticConfig default_synthetic_config();

void validate_synthetic_config(const SyntheticConfig& config);
SyntheticConfig parse_synthetic_config(const Json& json);
SyntheticConfig load_synthetic_config(const std::filesystem::path& path);
Json synthetic_config_to_json(const SyntheticConfig& config);

// Range of the intruder in a frame.
double synthetic_range(const SyntheticConfig& config, std::int64_t frame);
// Ground-truth box for a range; its size is inversely proportional to range.
BoxGeometry synthetic_box(const SyntheticConfig& config, double range_m);

struct SyntheticResult {
  Digest dataset_id;
  PredictionSet predictions;
  std::string predictions_jsonl;
};

// Ingests images and annotations and commits dataset_name through repo, and
// stores the prediction set. Output is a pure function of the config.
SyntheticResult generate(Repository& repo, const SyntheticConfig& config,
                         const std::string& dataset_name);

}  // namespace certkit

#endif  // CERTKIT_SYNTHGEN_HPP_
