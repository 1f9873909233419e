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

#include "certkit/odd.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "certkit/csv.hpp"
#include "certkit/error.hpp"

namespace certkit {
namespace {

constexpr std::string_view kDomainSpecType = "certkit.domain-spec.v1";

void invalid(const std::string& message) {
  fail(ErrorCode::kInvalidArgument, "domain spec: " + message);
}

std::string_view unit_name(SamplingUnit unit) {
  return unit == SamplingUnit::kBox ? "box" : "image";
}

std::optional<AttributeValue> meta_value(const ImageMeta& meta, std::string_view name) {
  if (name == "camera_id") return meta.info.camera_id;
  if (name == "flight_id") return meta.info.flight_id;
  if (name == "sequence_id" && meta.info.sequence_id) return *meta.info.sequence_id;
  return std::nullopt;
}

// Bins the value, folding kind mismatches into "unbinned".
std::optional<std::size_t> try_bin(const DomainDimension& dim,
                                   const std::optional<AttributeValue>& value,
                                   bool& mismatch) {
  mismatch = false;
  if (!value) return std::nullopt;
  const bool numeric = std::holds_alternative<double>(*value);
  if (numeric != (dim.kind == DimensionKind::kNumeric)) {
    mismatch = true;
    return std::nullopt;
  }
  return bin_of(dim, *value);
}

std::optional<std::size_t> sample_bin(const DomainDimension& dim,
                                      const ResolvedEntry& entry,
                                      const BoundingBox* box, bool& mismatch) {
  return try_bin(dim, box ? box_value(entry, *box, dim.name) : image_value(entry, dim.name),
                 mismatch);
}

}  // namespace

SamplingUnit default_unit(std::string_view dimension_name) {
  return dimension_name == kIntruderRange || dimension_name == kCallsign
             ? SamplingUnit::kBox
             : SamplingUnit::kImage;
}

std::string DomainDimension::bin_label(std::size_t bin) const {
  if (kind == DimensionKind::kCategorical) return categories.at(bin);
  const Interval& iv = intervals.at(bin);
  return "[" + format_decimal(iv.lo) + "," + format_decimal(iv.hi) + ")";
}

const DomainDimension* OperationalDomainSpec::find(std::string_view name) const {
  for (const auto& d : dimensions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

void validate_dimension(const DomainDimension& dim) {
  if (dim.name.empty()) invalid("dimension name must not be empty");
  const std::string where = "dimension '" + dim.name + "': ";
  if (dim.bin_count() == 0) invalid(where + "at least one bin is required");
  if (dim.kind == DimensionKind::kNumeric) {
    if (!dim.categories.empty()) invalid(where + "numeric dimension has categories");
    for (std::size_t i = 0; i < dim.intervals.size(); ++i) {
      const Interval& iv = dim.intervals[i];
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        invalid(where + "interval " + dim.bin_label(i) + " is empty or not finite");
      }
      if (i > 0) {
        const Interval& prev = dim.intervals[i - 1];
        if (iv.lo < prev.hi) {
          if (iv.lo >= prev.lo) {
            invalid(where + "intervals " + dim.bin_label(i - 1) + " and " +
                    dim.bin_label(i) + " overlap");
          }
          invalid(where + "intervals must be sorted by lower bound");
        }
      }
    }
  } else {
    if (!dim.intervals.empty()) invalid(where + "categorical dimension has intervals");
    std::set<std::string> seen;
    for (const auto& c : dim.categories) {
      if (c.empty()) invalid(where + "categories must not be empty");
      if (!seen.insert(c).second) invalid(where + "duplicate category '" + c + "'");
    }
  }
  if (dim.min_count.size() != dim.bin_count()) {
    invalid(where + "min_count needs one entry per bin");
  }
  for (auto m : dim.min_count) {
    if (m < 0) invalid(where + "min_count must be non-negative");
  }
  if (dim.expected_proportion) {
    const auto& p = *dim.expected_proportion;
    if (p.size() != dim.bin_count()) {
      invalid(where + "expected_proportion needs one entry per bin");
    }
    double sum = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0) {
        invalid(where + "expected_proportion entries must be non-negative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      invalid(where + "expected_proportion sums to " + format_decimal(sum) +
              ", not 1");
    }
  }
}

OperationalDomainSpec parse_domain_spec(const Json& json) {
  if (const Json* type = optional_field(json, "type")) {
    if (json_string(*type, "type") != kDomainSpecType) invalid("unexpected type");
  }
  OperationalDomainSpec spec{Digest::of(""), {}};
  const Json& dims = require_field(json, "dimensions", "domain spec");
  if (!dims.is_array() || dims.empty()) invalid("at least one dimension is required");
  std::set<std::string> names;
  for (const Json& d : dims) {
    DomainDimension dim;
    dim.name = json_string(require_field(d, "name", "dimension"), "name");
    const std::string& kind = json_string(require_field(d, "kind", "dimension"), "kind");
    if (kind == "numeric") {
      dim.kind = DimensionKind::kNumeric;
    } else if (kind == "categorical") {
      dim.kind = DimensionKind::kCategorical;
    } else {
      invalid("dimension '" + dim.name + "': kind must be numeric or categorical");
    }
    dim.unit = default_unit(dim.name);
    if (const Json* unit = optional_field(d, "unit")) {
      const std::string& u = json_string(*unit, "unit");
      if (u == "box") {
        dim.unit = SamplingUnit::kBox;
      } else if (u == "image") {
        dim.unit = SamplingUnit::kImage;
      } else {
        invalid("dimension '" + dim.name + "': unit must be box or image");
      }
    }
    const Json& bins = require_field(d, "bins", "dimension");
    if (!bins.is_array()) invalid("dimension '" + dim.name + "': bins must be a list");
    for (const Json& b : bins) {
      if (dim.kind == DimensionKind::kNumeric) {
        if (!b.is_array() || b.size() != 2) {
          invalid("dimension '" + dim.name + "': numeric bins are [lo, hi] pairs");
        }
        dim.intervals.push_back(Interval{json_real(b[0], "lo"), json_real(b[1], "hi")});
      } else {
        dim.categories.push_back(json_string(b, "category"));
      }
    }
    if (const Json* mc = optional_field(d, "min_count")) {
      if (mc->is_array()) {
        for (const Json& m : *mc) dim.min_count.push_back(json_int(m, "min_count"));
      } else {
        dim.min_count.assign(dim.bin_count(), json_int(*mc, "min_count"));
      }
    } else {
      dim.min_count.assign(dim.bin_count(), 0);
    }
    if (const Json* p = optional_field(d, "expected_proportion")) {
      std::vector<double> props;
      for (const Json& v : *p) props.push_back(json_real(v, "expected_proportion"));
      dim.expected_proportion = std::move(props);
    }
    validate_dimension(dim);
    if (!names.insert(dim.name).second) invalid("duplicate dimension '" + dim.name + "'");
    spec.dimensions.push_back(std::move(dim));
  }
  spec.spec_id = Digest::of(canonical_dump(domain_spec_to_json(spec)));
  return spec;
}

OperationalDomainSpec load_domain_spec(const std::filesystem::path& path) {
  return parse_domain_spec(parse_json(read_file(path), path.string()));
}

Json domain_spec_to_json(const OperationalDomainSpec& spec) {
  Json dims = Json::array();
  for (const auto& dim : spec.dimensions) {
    Json bins = Json::array();
    if (dim.kind == DimensionKind::kNumeric) {
      for (const auto& iv : dim.intervals) {
        bins.push_back(Json::array({format_decimal(iv.lo), format_decimal(iv.hi)}));
      }
    } else {
      for (const auto& c : dim.categories) bins.push_back(c);
    }
    Json d{
        {"name", dim.name},
        {"kind", dim.kind == DimensionKind::kNumeric ? "numeric" : "categorical"},
        {"unit", unit_name(dim.unit)},
        {"bins", std::move(bins)},
        {"min_count", dim.min_count},
    };
    if (dim.expected_proportion) {
      Json p = Json::array();
      for (double v : *dim.expected_proportion) p.push_back(format_decimal(v));
      d["expected_proportion"] = std::move(p);
    }
    dims.push_back(std::move(d));
  }
  return Json{{"type", kDomainSpecType}, {"dimensions", std::move(dims)}};
}

std::optional<std::size_t> bin_of(const DomainDimension& dim, const AttributeValue& value) {
  if (dim.kind == DimensionKind::kNumeric) {
    const double* v = std::get_if<double>(&value);
    if (v == nullptr) {
      fail(ErrorCode::kInvalidArgument,
           "dimension '" + dim.name + "' is numeric but the value is text");
    }
    for (std::size_t i = 0; i < dim.intervals.size(); ++i) {
      if (dim.intervals[i].lo <= *v && *v < dim.intervals[i].hi) return i;
    }
    return std::nullopt;
  }
  const std::string* s = std::get_if<std::string>(&value);
  if (s == nullptr) {
    fail(ErrorCode::kInvalidArgument,
         "dimension '" + dim.name + "' is categorical but the value is numeric");
  }
  for (std::size_t i = 0; i < dim.categories.size(); ++i) {
    if (dim.categories[i] == *s) return i;
  }
  return std::nullopt;
}

std::optional<AttributeValue> box_value(const ResolvedEntry& entry, const BoundingBox& box,
                                        std::string_view name) {
  if (const AttributeValue* v = find_attribute(box.attributes, name)) return *v;
  return image_value(entry, name);
}

std::optional<AttributeValue> image_value(const ResolvedEntry& entry, std::string_view name) {
  if (const AttributeValue* v = find_attribute(entry.annotation.attributes, name)) return *v;
  return meta_value(entry.image, name);
}

CoverageReport coverage(const ResolvedDataset& dataset, const OperationalDomainSpec& spec,
                        const CoverageOptions& options) {
  CoverageReport report{dataset.manifest.dataset_id, spec.spec_id, {}, std::nullopt, 0, 0, true};
  for (const auto& dim : spec.dimensions) {
    DimensionCoverage dc;
    dc.name = dim.name;
    dc.unit = dim.unit;
    std::vector<std::int64_t> counts(dim.bin_count(), 0);
    auto tally = [&](const ResolvedEntry& entry, const BoundingBox* box) {
      ++dc.total;
      bool mismatch = false;
      if (auto bin = sample_bin(dim, entry, box, mismatch)) {
        ++counts[*bin];
      } else {
        ++dc.unbinned;
        if (mismatch) ++dc.type_mismatch;
      }
    };
    for (const auto& entry : dataset.entries) {
      if (dim.unit == SamplingUnit::kBox) {
        for (const auto& box : entry.annotation.boxes) tally(entry, &box);
      } else {
        tally(entry, nullptr);
      }
    }
    const std::int64_t binned = dc.total - dc.unbinned;
    dc.pass = true;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      BinCoverage bin;
      bin.label = dim.bin_label(i);
      bin.count = counts[i];
      bin.min_count = dim.min_count[i];
      bin.covered = counts[i] >= dim.min_count[i];
      bin.observed_proportion =
          binned > 0 ? static_cast<double>(counts[i]) / static_cast<double>(binned) : 0.0;
      if (dim.expected_proportion) {
        bin.expected_proportion = (*dim.expected_proportion)[i];
        bin.deviation = bin.observed_proportion - (*dim.expected_proportion)[i];
      }
      dc.pass = dc.pass && bin.covered;
      report.covered_bins += bin.covered ? 1 : 0;
      ++report.total_bins;
      dc.bins.push_back(std::move(bin));
    }
    report.overall_pass = report.overall_pass && dc.pass;
    report.dimensions.push_back(std::move(dc));
  }

  if (options.cross) {
    const DomainDimension* a = spec.find(options.cross->first);
    const DomainDimension* b = spec.find(options.cross->second);
    if (a == nullptr || b == nullptr || a == b) {
      fail(ErrorCode::kInvalidArgument,
           "cross-tabulation needs two distinct dimensions of the domain spec");
    }
    CrossTabulation ct{a->name, b->name, {}, {}, {}, 0};
    for (std::size_t i = 0; i < a->bin_count(); ++i) ct.first_labels.push_back(a->bin_label(i));
    for (std::size_t i = 0; i < b->bin_count(); ++i) ct.second_labels.push_back(b->bin_label(i));
    ct.counts.assign(a->bin_count(), std::vector<std::int64_t>(b->bin_count(), 0));
    const bool per_box = a->unit == SamplingUnit::kBox || b->unit == SamplingUnit::kBox;
    auto tally = [&](const ResolvedEntry& entry, const BoundingBox* box) {
      bool mismatch = false;
      auto i = sample_bin(*a, entry, box, mismatch);
      auto j = sample_bin(*b, entry, box, mismatch);
      if (i && j) {
        ++ct.counts[*i][*j];
      } else {
        ++ct.unbinned;
      }
    };
    for (const auto& entry : dataset.entries) {
      if (per_box) {
        for (const auto& box : entry.annotation.boxes) tally(entry, &box);
      } else {
        tally(entry, nullptr);
      }
    }
    report.cross = std::move(ct);
  }
  return report;
}

CoverageReport coverage(const Repository& repo, const Digest& dataset_id,
                        const OperationalDomainSpec& spec, const CoverageOptions& options) {
  return coverage(repo.resolve_dataset(dataset_id), spec, options);
}

Json coverage_to_json(const CoverageReport& report) {
  Json dims = Json::array();
  for (const auto& dc : report.dimensions) {
    Json bins = Json::array();
    for (const auto& b : dc.bins) {
      Json jb{
          {"bin", b.label},
          {"count", b.count},
          {"min_count", b.min_count},
          {"covered", b.covered},
          {"observed_proportion", format_decimal(b.observed_proportion)},
      };
      if (b.expected_proportion) {
        jb["expected_proportion"] = format_decimal(*b.expected_proportion);
        jb["deviation"] = format_decimal(*b.deviation);
      }
      bins.push_back(std::move(jb));
    }
    dims.push_back(Json{
        {"name", dc.name},
        {"unit", unit_name(dc.unit)},
        {"bins", std::move(bins)},
        {"unbinned", dc.unbinned},
        {"type_mismatch", dc.type_mismatch},
        {"total", dc.total},
        {"pass", dc.pass},
    });
  }
  Json out{
      {"type", "certkit.coverage.v1"},
      {"dataset", report.dataset_id.str()},
      {"domain_spec", report.spec_id.str()},
      {"dimensions", std::move(dims)},
      {"covered_bins", report.covered_bins},
      {"total_bins", report.total_bins},
      {"overall_pass", report.overall_pass},
  };
  if (report.cross) {
    out["cross"] = Json{
        {"first", report.cross->first},
        {"second", report.cross->second},
        {"first_bins", report.cross->first_labels},
        {"second_bins", report.cross->second_labels},
        {"counts", report.cross->counts},
        {"unbinned", report.cross->unbinned},
    };
  }
  return out;
}

std::string coverage_csv(const CoverageReport& report) {
  std::string out =
      "dimension,bin,count,min_count,covered,observed_proportion,"
      "expected_proportion,deviation\n";
  for (const auto& dc : report.dimensions) {
    for (const auto& b : dc.bins) {
      out += csv_field(dc.name) + "," + csv_field(b.label) + "," + std::to_string(b.count) + "," +
             std::to_string(b.min_count) + "," + (b.covered ? "true" : "false") + "," +
             format_decimal(b.observed_proportion) + "," +
             (b.expected_proportion ? format_decimal(*b.expected_proportion) : "") + "," +
             (b.deviation ? format_decimal(*b.deviation) : "") + "\n";
    }
    out += csv_field(dc.name) + ",(unbinned)," + std::to_string(dc.unbinned) + ",,,,,\n";
  }
  return out;
}

}  // namespace certkit
