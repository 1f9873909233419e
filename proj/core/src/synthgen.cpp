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

#include "certkit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "certkit/error.hpp"
#include "certkit/prng.hpp"
#include "certkit/timestamp.hpp"

namespace certkit {
namespace {

constexpr std::int64_t kBaseTime = 1767225600;  // 2026-01-01T00:00:00Z
constexpr double kBoxScale = 4000.0;            // apparent width (px) times range (m)
constexpr std::string_view kTimesOfDay[] = {"day", "dusk", "night", "dawn"};

void invalid(const std::string& message) {
  fail(ErrorCode::kInvalidArgument, "synthetic config: " + message);
}

Interval read_interval(const Json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 2) invalid(std::string(what) + " must be [lo, hi]");
  return Interval{json_real(j[0], what), json_real(j[1], what)};
}

Json interval_json(const Interval& i) {
  return Json::array({format_decimal(i.lo), format_decimal(i.hi)});
}

std::string numbered(const char* prefix, std::int64_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%03lld", prefix, static_cast<long long>(n));
  return buf;
}

std::optional<std::size_t> range_bin(const SyntheticConfig& config, double range) {
  for (std::size_t b = 0; b < config.bins.size(); ++b) {
    if (range >= config.bins[b].lo && range < config.bins[b].hi) return b;
  }
  return std::nullopt;
}

void put_u32(std::string& bytes, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    bytes[at + i] = static_cast<char>((v >> (24 - 8 * i)) & 0xFF);
  }
}

// Binary PGM: a faint gradient, the intruder as a bright block, and an
// identifying stamp in the first row so that every frame is distinct.
std::string render_frame(const SyntheticConfig& config, const std::string& config_hex,
                         std::int64_t encounter, std::int64_t frame, const BoxGeometry& box) {
  const auto w = static_cast<std::size_t>(config.image_width);
  const auto h = static_cast<std::size_t>(config.image_height);
  std::string bytes = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const std::size_t header = bytes.size();
  bytes.resize(header + w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double px = static_cast<double>(x) + 0.5;
      const double py = static_cast<double>(y) + 0.5;
      const bool inside = px >= box.x && px < box.x + box.w && py >= box.y && py < box.y + box.h;
      bytes[header + y * w + x] = static_cast<char>(inside ? 220 : 40 + (x + y) % 24);
    }
  }
  for (std::size_t i = 0; i < 8; ++i) {
    bytes[header + i] =
        static_cast<char>(std::stoi(config_hex.substr(2 * i, 2), nullptr, 16));
  }
  put_u32(bytes, header + 8, static_cast<std::uint32_t>(encounter));
  put_u32(bytes, header + 12, static_cast<std::uint32_t>(frame));
  return bytes;
}

}  // namespace

SyntheticConfig default_synthetic_config() {
  SyntheticConfig c;
  c.bins = {{0.0, 375.0}, {375.0, 750.0}, {750.0, 1115.0}, {1115.0, 1500.0}};
  c.detection_probability = {0.95, 0.85, 0.6, 0.3};
  return c;
}

void validate_synthetic_config(const SyntheticConfig& c) {
  if (c.n_encounters < 1 || c.n_encounters > 100000) {
    invalid("n_encounters must lie in [1, 100000]");
  }
  if (c.frames_per_encounter < 1 || c.frames_per_encounter > 100000) {
    invalid("frames_per_encounter must lie in [1, 100000]");
  }
  if (c.image_width < 16 || c.image_height < 8 || c.image_width > 4096 ||
      c.image_height > 4096) {
    invalid("image size must be between 16x8 and 4096x4096");
  }
  if (!(c.range_start_m > 0.0) || !(c.range_end_m > 0.0) || !std::isfinite(c.range_start_m) ||
      !std::isfinite(c.range_end_m)) {
    invalid("ranges must be positive");
  }
  if (c.bins.empty()) invalid("at least one range bin is required");
  for (std::size_t b = 0; b < c.bins.size(); ++b) {
    if (!(c.bins[b].lo < c.bins[b].hi)) invalid("range bins need lo < hi");
    if (b > 0 && c.bins[b].lo < c.bins[b - 1].hi) invalid("range bins must be sorted and disjoint");
  }
  if (c.detection_probability.size() != c.bins.size()) {
    invalid("detection_probability needs one entry per bin");
  }
  for (double p : c.detection_probability) {
    if (!(p >= 0.0 && p <= 1.0)) invalid("probabilities must lie in [0, 1]");
  }
  for (const Interval* i : {&c.tp_confidence, &c.fp_confidence}) {
    if (!(i->lo >= 0.0 && i->lo <= i->hi && i->hi <= 1.0)) {
      invalid("confidence ranges must satisfy 0 <= lo <= hi <= 1");
    }
  }
  if (!(c.localization_noise_px >= 0.0) || !std::isfinite(c.localization_noise_px)) {
    invalid("localization_noise_px must be >= 0");
  }
  if (!(c.fp_rate_per_image >= 0.0 && c.fp_rate_per_image <= 100.0)) {
    invalid("fp_rate_per_image must lie in [0, 100]");
  }
  if (c.class_label.empty()) invalid("class is required");
  for (std::int64_t k = 0; k < c.frames_per_encounter; ++k) {
    const double r = synthetic_range(c, k);
    if (!range_bin(c, r)) invalid("range " + format_decimal(r) + " m falls outside every bin");
  }
}

SyntheticConfig parse_synthetic_config(const Json& json) {
  if (!json.is_object()) invalid("expected an object");
  SyntheticConfig c = default_synthetic_config();
  if (const Json* v = optional_field(json, "seed")) {
    if (v->is_number_unsigned()) {
      c.seed = v->get<std::uint64_t>();
    } else {
      const auto s = json_int(*v, "seed");
      if (s < 0) invalid("seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    }
  }
  if (const Json* v = optional_field(json, "n_encounters")) c.n_encounters = json_int(*v, "n_encounters");
  if (const Json* v = optional_field(json, "frames_per_encounter")) {
    c.frames_per_encounter = json_int(*v, "frames_per_encounter");
  }
  if (const Json* v = optional_field(json, "image_width")) c.image_width = json_int(*v, "image_width");
  if (const Json* v = optional_field(json, "image_height")) c.image_height = json_int(*v, "image_height");
  if (const Json* v = optional_field(json, "range_start_m")) c.range_start_m = json_real(*v, "range_start_m");
  if (const Json* v = optional_field(json, "range_end_m")) c.range_end_m = json_real(*v, "range_end_m");
  if (const Json* v = optional_field(json, "bins")) {
    if (!v->is_array()) invalid("bins must be a list");
    c.bins.clear();
    for (const Json& b : *v) c.bins.push_back(read_interval(b, "bin"));
  }
  if (const Json* v = optional_field(json, "detection_probability")) {
    if (!v->is_array()) invalid("detection_probability must be a list");
    c.detection_probability.clear();
    for (const Json& p : *v) c.detection_probability.push_back(json_real(p, "detection_probability"));
  }
  if (const Json* v = optional_field(json, "tp_confidence")) c.tp_confidence = read_interval(*v, "tp_confidence");
  if (const Json* v = optional_field(json, "fp_confidence")) c.fp_confidence = read_interval(*v, "fp_confidence");
  if (const Json* v = optional_field(json, "localization_noise_px")) {
    c.localization_noise_px = json_real(*v, "localization_noise_px");
  }
  if (const Json* v = optional_field(json, "fp_rate_per_image")) {
    c.fp_rate_per_image = json_real(*v, "fp_rate_per_image");
  }
  if (const Json* v = optional_field(json, "class")) c.class_label = json_string(*v, "class");
  if (const Json* v = optional_field(json, "role")) c.role = role_from_name(json_string(*v, "role"));
  validate_synthetic_config(c);
  return c;
}

SyntheticConfig load_synthetic_config(const std::filesystem::path& path) {
  return parse_synthetic_config(parse_json(read_file(path), path.string()));
}

Json synthetic_config_to_json(const SyntheticConfig& c) {
  Json bins = Json::array();
  for (const auto& b : c.bins) bins.push_back(interval_json(b));
  Json probs = Json::array();
  for (double p : c.detection_probability) probs.push_back(format_decimal(p));
  return Json{{"seed", c.seed},
              {"n_encounters", c.n_encounters},
              {"frames_per_encounter", c.frames_per_encounter},
              {"image_width", c.image_width},
              {"image_height", c.image_height},
              {"range_start_m", format_decimal(c.range_start_m)},
              {"range_end_m", format_decimal(c.range_end_m)},
              {"bins", std::move(bins)},
              {"detection_probability", std::move(probs)},
              {"tp_confidence", interval_json(c.tp_confidence)},
              {"fp_confidence", interval_json(c.fp_confidence)},
              {"localization_noise_px", format_decimal(c.localization_noise_px)},
              {"fp_rate_per_image", format_decimal(c.fp_rate_per_image)},
              {"class", c.class_label},
              {"role", role_name(c.role)}};
}

double synthetic_range(const SyntheticConfig& c, std::int64_t frame) {
  if (c.frames_per_encounter <= 1) return c.range_start_m;
  const double t =
      static_cast<double>(frame) / static_cast<double>(c.frames_per_encounter - 1);
  return c.range_start_m + (c.range_end_m - c.range_start_m) * t;
}

BoxGeometry synthetic_box(const SyntheticConfig& c, double range_m) {
  const auto W = static_cast<double>(c.image_width);
  const auto H = static_cast<double>(c.image_height);
  const double w = std::min(kBoxScale / range_m, W - 2.0);
  const double h = std::min(w / 2.0, H - 2.0);
  return BoxGeometry{(W - w) / 2.0, (H - h) / 2.0, w, h};
}

SyntheticResult generate(Repository& repo, const SyntheticConfig& config,
                         const std::string& dataset_name) {
  validate_synthetic_config(config);
  const std::string config_hex =
      Digest::of(canonical_dump(synthetic_config_to_json(config))).hex();
  const auto W = static_cast<double>(config.image_width);
  const auto H = static_cast<double>(config.image_height);
  const double fp_whole = std::floor(config.fp_rate_per_image);
  const double fp_frac = config.fp_rate_per_image - fp_whole;

  SplitMix64 root(config.seed);
  DatasetDraft draft{dataset_name, std::nullopt, config.role, {}};
  std::vector<ImagePredictions> images;
  for (std::int64_t e = 0; e < config.n_encounters; ++e) {
    SplitMix64 rng(root.next());
    // Each encounter drifts vertically by a few pixels.
    const double dy = rng.uniform(-0.2, 0.2) * H;
    for (std::int64_t k = 0; k < config.frames_per_encounter; ++k) {
      const double range = synthetic_range(config, k);
      BoxGeometry gt = synthetic_box(config, range);
      gt.y = std::clamp(gt.y + dy, 0.0, H - gt.h);

      ImageInfo info;
      info.capture_time = format_utc(kBaseTime + e * 3600 + k);
      info.camera_id = "synth-camera";
      info.flight_id = numbered("synth-flight", e);
      info.sequence_id = numbered("encounter", e);
      info.frame_index = k;
      const ImageMeta meta =
          repo.ingest_image(render_frame(config, config_hex, e, k, gt), info);

      BoundingBox box{gt, config.class_label, BoxSource::kManual, {}};
      box.attributes.emplace(std::string(kIntruderRange), range);
      AnnotationRecord record{meta.image_digest, std::nullopt, {box}, {}, "synthgen",
                              format_utc(kBaseTime)};
      record.attributes.emplace(std::string(kTimeOfDay),
                                std::string(kTimesOfDay[static_cast<std::size_t>(e % 4)]));
      draft.entries.push_back(DatasetEntry{meta.image_digest, repo.commit_annotation(record)});

      ImagePredictions ip{meta.image_digest, {}};
      const double p = config.detection_probability[*range_bin(config, range)];
      if (rng.bernoulli(p)) {
        const double s = config.localization_noise_px;
        BoxGeometry d{gt.x + s * rng.normal(), gt.y + s * rng.normal(),
                      std::max(0.1, gt.w + s * rng.normal()),
                      std::max(0.1, gt.h + s * rng.normal())};
        ip.detections.push_back(Detection{
            d, config.class_label, rng.uniform(config.tp_confidence.lo, config.tp_confidence.hi)});
      }
      const int n_fp = static_cast<int>(fp_whole) + (rng.bernoulli(fp_frac) ? 1 : 0);
      for (int f = 0; f < n_fp; ++f) {
        const double w = rng.uniform(2.0, 8.0);
        const double h = w / 2.0;
        BoxGeometry d{rng.uniform(0.0, W - w), rng.uniform(0.0, H - h), w, h};
        ip.detections.push_back(Detection{
            d, config.class_label, rng.uniform(config.fp_confidence.lo, config.fp_confidence.hi)});
      }
      images.push_back(std::move(ip));
    }
  }

  const Digest dataset_id = repo.commit_dataset(draft);
  std::sort(images.begin(), images.end(),
            [](const auto& a, const auto& b) { return a.image_digest < b.image_digest; });
  PredictionSet predictions{Digest::of(""), dataset_id, std::nullopt, std::move(images)};
  predictions.prediction_set_id = Digest::of(canonical_dump(prediction_set_to_json(predictions)));
  store_predictions(repo.store(), predictions);
  SyntheticResult result{dataset_id, std::move(predictions), {}};
  result.predictions_jsonl = predictions_to_jsonl(result.predictions);
  return result;
}

}  // namespace certkit
