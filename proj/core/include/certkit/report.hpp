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

#ifndef CERTKIT_REPORT_HPP_
#define CERTKIT_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "certkit/evaluation.hpp"
#include "certkit/stability.hpp"

namespace certkit {

// Intruder range in four bins: 0-375, 375-750, 750-1115 and 1115-1500 m.
DomainDimension standard_range_dimension();

// bin_lo,bin_hi,ap,n_gt,dimension,label,n_images
// bin_lo and bin_hi are empty for categorical bins, ap when it is undefined.
std::string sensitivity_csv(std::span<const PartitionResult> partitions);
// Bar chart of AP per bin. Byte-stable: no timestamps, ids or locale.
std::string sensitivity_svg(std::span<const PartitionResult> partitions,
                            const std::string& title);
// name,threshold,observed,pass
std::string requirements_csv(std::span<const RequirementRow> rows);

struct ReportOptions {
  // Dimension plotted in sensitivity.svg; defaults to intruder_range_m when
  // present, otherwise the first dimension of the report.
  std::string chart_dimension;
  std::optional<std::vector<StabilityRow>> stability;
};

struct ReportBundle {
  std::filesystem::path directory;
  Digest bundle_digest;  // digest of report.json, also stored as report-bundle
  std::vector<std::string> files;  // sorted
};

// Writes report.json, coverage.csv, sensitivity.csv, requirements.csv,
// sensitivity.svg, stability.csv (when supplied) and SHA256SUMS.
ReportBundle generate_report(Repository& repo, const Digest& evaluation_report_id,
                             const std::filesystem::path& directory,
                             const ReportOptions& options = {});

// Problems found in a bundle directory: checksum mismatches, a report.json
// that is not in the store, provenance digests that do not resolve.
std::vector<std::string> verify_report_bundle(const ContentStore& store,
                                              const std::filesystem::path& directory);

}  // namespace certkit

#endif  // CERTKIT_REPORT_HPP_
