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
#ifndef CERTKIT_ODD_HPP_
#define CERTKIT_ODD_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "certkit/repository.hpp"

namespace certkit {

enum class DimensionKind { kCategorical, kNumeric };

// Box-unit dimensions count ground-truth boxes, image-unit dimensions count
// images. intruder_range_m and callsign default to box; everything else to
// image.
enum class SamplingUnit { kBox, kImage };

// Half-open [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct DomainDimension {
  std::string name;
  DimensionKind kind = DimensionKind::kNumeric;
  SamplingUnit unit = SamplingUnit::kImage;
  std::vector<std::string> categories;  // categorical only
  std::vector<Interval> intervals;      // numeric only
  std::optional<std::vector<double>> expected_proportion;
  std::vector<std::int64_t> min_count;  // one per bin

  std::size_t bin_count() const {
    return kind == DimensionKind::kNumeric ? intervals.size() : categories.size();
  }
  // "[375,750)" for intervals, the category itself otherwise.
  std::string bin_label(std::size_t bin) const;
};

struct OperationalDomainSpec {
  Digest spec_id;
  std::vector<DomainDimension> dimensions;

  const DomainDimension* find(std::string_view name) const;
};

SamplingUnit default_unit(std::string_view dimension_name);

void validate_dimension(const DomainDimension& dimension);
OperationalDomainSpec parse_domain_spec(const Json& json);
OperationalDomainSpec load_domain_spec(const std::filesystem::path& path);
// Canonical form; spec_id is the digest of canonical_dump() of this.
Json domain_spec_to_json(const OperationalDomainSpec& spec);

// Unique bin holding the value, or nullopt when it falls outside every bin.
// Throws Error(kInvalidArgument) when the value kind does not match the
// dimension kind.
std::optional<std::size_t> bin_of(const DomainDimension& dimension,
                                  const AttributeValue& value);

// Attribute lookup for one sample. For a box: the box's own attributes, then
// the annotation's, then the image metadata (camera_id, flight_id,
// sequence_id). For an image: the annotation's, then the image metadata.
std::optional<AttributeValue> box_value(const ResolvedEntry& entry,
                                        const BoundingBox& box,
                                        std::string_view name);
std::optional<AttributeValue> image_value(const ResolvedEntry& entry,
                                          std::string_view name);

struct BinCoverage {
  std::string label;
  std::int64_t count = 0;
  std::int64_t min_count = 0;
  bool covered = false;
  double observed_proportion = 0.0;  // share of binned samples
  std::optional<double> expected_proportion;
  std::optional<double> deviation;  // observed - expected
};

struct DimensionCoverage {
  std::string name;
  SamplingUnit unit = SamplingUnit::kImage;
  std::vector<BinCoverage> bins;
  std::int64_t unbinned = 0;       // missing, out of range or wrong kind
  std::int64_t type_mismatch = 0;  // subset of unbinned
  std::int64_t total = 0;
  bool pass = false;
};

struct CrossTabulation {
  std::string first;
  std::string second;
  std::vector<std::string> first_labels;
  std::vector<std::string> second_labels;
  std::vector<std::vector<std::int64_t>> counts;  // [first bin][second bin]
  std::int64_t unbinned = 0;
};

struct CoverageReport {
  Digest dataset_id;
  Digest spec_id;
  std::vector<DimensionCoverage> dimensions;
  std::optional<CrossTabulation> cross;
  std::size_t covered_bins = 0;
  std::size_t total_bins = 0;
  bool overall_pass = false;
};

struct CoverageOptions {
  std::optional<std::pair<std::string, std::string>> cross;
};

CoverageReport coverage(const ResolvedDataset& dataset,
                        const OperationalDomainSpec& spec,
                        const CoverageOptions& options = {});
CoverageReport coverage(const Repository& repo, const Digest& dataset_id,
                        const OperationalDomainSpec& spec,
                        const CoverageOptions& options = {});

Json coverage_to_json(const CoverageReport& report);
// dimension,bin,count,min_count,covered,observed_proportion,expected_proportion,deviation
std::string coverage_csv(const CoverageReport& report);

}  // namespace certkit

#endif  // CERTKIT_ODD_HPP_
