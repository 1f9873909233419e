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

#include "certkit/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "certkit/csv.hpp"
#include "certkit/error.hpp"

namespace certkit {
namespace {

constexpr std::string_view kBundleType = "certkit.report-bundle.v1";
constexpr std::string_view kSums = "SHA256SUMS";
constexpr std::string_view kReportFile = "report.json";

std::string fixed(double value, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  std::string out(buf, res.ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<PartitionResult> chart_partitions(const EvaluationReport& report,
                                              std::string dimension) {
  if (dimension.empty()) {
    const bool has_range = std::any_of(report.partitions.begin(), report.partitions.end(),
                                       [](const auto& p) { return p.dimension == kIntruderRange; });
    if (has_range) {
      dimension = std::string(kIntruderRange);
    } else if (!report.partitions.empty()) {
      dimension = report.partitions.front().dimension;
    }
  }
  std::vector<PartitionResult> out;
  for (const auto& p : report.partitions) {
    if (p.dimension == dimension) out.push_back(p);
  }
  if (out.empty() && !report.partitions.empty()) {
    fail(ErrorCode::kInvalidArgument, "report has no partitions for dimension " + dimension);
  }
  return out;
}

}  // namespace

DomainDimension standard_range_dimension() {
  DomainDimension d;
  d.name = std::string(kIntruderRange);
  d.kind = DimensionKind::kNumeric;
  d.unit = SamplingUnit::kBox;
  d.intervals = {{0.0, 375.0}, {375.0, 750.0}, {750.0, 1115.0}, {1115.0, 1500.0}};
  d.min_count = {1, 1, 1, 1};
  return d;
}

std::string sensitivity_csv(std::span<const PartitionResult> partitions) {
  std::string out = "bin_lo,bin_hi,ap,n_gt,dimension,label,n_images\n";
  for (const auto& p : partitions) {
    out += (p.interval ? format_decimal(p.interval->lo) : "") + "," +
           (p.interval ? format_decimal(p.interval->hi) : "") + "," +
           (p.ap ? format_decimal(*p.ap) : "") + "," + std::to_string(p.n_gt) + "," +
           csv_field(p.dimension) + "," + csv_field(p.label) + "," +
           std::to_string(p.n_images) + "\n";
  }
  return out;
}

std::string sensitivity_svg(std::span<const PartitionResult> partitions,
                            const std::string& title) {
  constexpr double kWidth = 480, kHeight = 320;
  constexpr double kLeft = 56, kRight = 16, kTop = 40, kBottom = 56;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0)
    << "\" height=\"" << fixed(kHeight, 0) << "\" viewBox=\"0 0 " << fixed(kWidth, 0) << " "
    << fixed(kHeight, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fixed(kWidth, 0) << "\" height=\"" << fixed(kHeight, 0)
    << "\" fill=\"#ffffff\"/>\n";
  s << "<text x=\"" << fixed(kWidth / 2, 1) << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    const double y = kTop + plot_h * (1.0 - v);
    s << "<line x1=\"" << fixed(kLeft, 1) << "\" y1=\"" << fixed(y, 1) << "\" x2=\""
      << fixed(kLeft + plot_w, 1) << "\" y2=\"" << fixed(y, 1)
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << fixed(kLeft - 6, 1) << "\" y=\"" << fixed(y + 4, 1)
      << "\" text-anchor=\"end\">" << fixed(v, 2) << "</text>\n";
  }
  s << "<text x=\"14\" y=\"" << fixed(kTop + plot_h / 2, 1)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << fixed(kTop + plot_h / 2, 1)
    << ")\">AP</text>\n";
  const std::size_t n = partitions.size();
  const double slot = n > 0 ? plot_w / static_cast<double>(n) : plot_w;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = partitions[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double bar_w = slot * 0.6;
    if (p.ap) {
      const double h = plot_h * std::clamp(*p.ap, 0.0, 1.0);
      s << "<rect x=\"" << fixed(cx - bar_w / 2, 1) << "\" y=\"" << fixed(kTop + plot_h - h, 1)
        << "\" width=\"" << fixed(bar_w, 1) << "\" height=\"" << fixed(h, 1)
        << "\" fill=\"#4c72b0\"/>\n";
      s << "<text x=\"" << fixed(cx, 1) << "\" y=\"" << fixed(kTop + plot_h - h - 4, 1)
        << "\" text-anchor=\"middle\">" << fixed(*p.ap, 3) << "</text>\n";
    } else {
      s << "<text x=\"" << fixed(cx, 1) << "\" y=\"" << fixed(kTop + plot_h - 4, 1)
        << "\" text-anchor=\"middle\">n/a</text>\n";
    }
    s << "<text x=\"" << fixed(cx, 1) << "\" y=\"" << fixed(kTop + plot_h + 16, 1)
      << "\" text-anchor=\"middle\">" << xml_escape(p.label) << "</text>\n";
    s << "<text x=\"" << fixed(cx, 1) << "\" y=\"" << fixed(kTop + plot_h + 30, 1)
      << "\" text-anchor=\"middle\" fill=\"#666666\">n=" << p.n_gt << "</text>\n";
  }
  s << "<line x1=\"" << fixed(kLeft, 1) << "\" y1=\"" << fixed(kTop + plot_h, 1) << "\" x2=\""
    << fixed(kLeft + plot_w, 1) << "\" y2=\"" << fixed(kTop + plot_h, 1)
    << "\" stroke=\"#333333\"/>\n";
  if (n > 0) {
    s << "<text x=\"" << fixed(kLeft + plot_w / 2, 1) << "\" y=\"" << fixed(kHeight - 8, 1)
      << "\" text-anchor=\"middle\">" << xml_escape(partitions.front().dimension)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string requirements_csv(std::span<const RequirementRow> rows) {
  std::string out = "name,threshold,observed,pass\n";
  for (const auto& r : rows) {
    out += csv_field(r.name) + "," + format_decimal(r.threshold) + "," +
           format_decimal(r.observed) + "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

ReportBundle generate_report(Repository& repo, const Digest& evaluation_report_id,
                             const std::filesystem::path& directory,
                             const ReportOptions& options) {
  ContentStore& store = repo.store();
  if (!store.contains(evaluation_report_id)) {
    fail(ErrorCode::kNotFound,
         "dangling reference: evaluation report " + evaluation_report_id.str());
  }
  const EvaluationReport report = load_evaluation_report(store, evaluation_report_id);

  Json provenance{{"dataset", report.dataset_id.str()},
                  {"domain_spec", report.domain_spec_id.str()},
                  {"requirement_spec", report.requirement_spec_id.str()},
                  {"prediction_set", report.prediction_set_id.str()},
                  {"evaluation_report", evaluation_report_id.str()},
                  {"model_manifest", nullptr}};
  if (report.model_manifest) provenance["model_manifest"] = report.model_manifest->str();
  for (const auto& [field, value] : provenance.items()) {
    if (value.is_null()) continue;
    const Digest d = Digest::from_string(value.get<std::string>());
    if (!store.contains(d)) {
      fail(ErrorCode::kNotFound, "dangling reference: " + field + " " + d.str());
    }
  }

  OperationalDomainSpec domain =
      parse_domain_spec(parse_json(store.get(report.domain_spec_id), "domain spec"));
  const CoverageReport cov = coverage(repo, report.dataset_id, domain);
  const auto chart = chart_partitions(report, options.chart_dimension);

  std::map<std::string, std::string> files;
  files["coverage.csv"] = coverage_csv(cov);
  files["sensitivity.csv"] = sensitivity_csv(report.partitions);
  files["requirements.csv"] = requirements_csv(report.requirements);
  files["sensitivity.svg"] = sensitivity_svg(
      chart, chart.empty() ? "AP by partition" : "AP by " + chart.front().dimension);

  Json bundle{{"type", kBundleType},
              {"provenance", std::move(provenance)},
              {"evaluation", evaluation_report_to_json(report)},
              {"coverage", coverage_to_json(cov)},
              {"evaluation_pass", report.pass},
              {"coverage_pass", cov.overall_pass},
              {"notes", Json::array()}};
  if (options.stability) {
    bundle["stability"] = stability_to_json(*options.stability);
    files["stability.csv"] = stability_csv(*options.stability);
  } else {
    bundle["notes"].push_back("stability analysis not supplied; section omitted");
  }
  // report.json is byte-identical to the stored object.
  files[std::string(kReportFile)] = canonical_dump(bundle);
  const Digest bundle_digest =
      store.put(files[std::string(kReportFile)], ObjectKind::kReportBundle);

  std::string sums;
  for (const auto& [name, bytes] : files) {
    sums += Digest::of(bytes).hex() + "  " + name + "\n";
  }
  files[std::string(kSums)] = sums;

  std::filesystem::create_directories(directory);
  ReportBundle out{directory, bundle_digest, {}};
  for (const auto& [name, bytes] : files) {
    write_file(directory / name, bytes);
    out.files.push_back(name);
  }
  return out;
}

std::vector<std::string> verify_report_bundle(const ContentStore& store,
                                              const std::filesystem::path& directory) {
  std::vector<std::string> problems;
  std::istringstream sums(read_file(directory / kSums));
  std::string line;
  bool saw_report = false;
  while (std::getline(sums, line)) {
    const auto sep = line.find("  ");
    if (sep == std::string::npos) {
      problems.push_back("malformed checksum line: " + line);
      continue;
    }
    const std::string name = line.substr(sep + 2);
    saw_report = saw_report || name == kReportFile;
    const auto path = directory / name;
    if (!std::filesystem::exists(path)) {
      problems.push_back(name + ": missing");
    } else if (Digest::of(read_file(path)).hex() != line.substr(0, sep)) {
      problems.push_back(name + ": checksum mismatch");
    }
  }
  if (!saw_report) {
    problems.push_back("report.json is not listed in SHA256SUMS");
    return problems;
  }
  const std::string text = read_file(directory / kReportFile);
  const Digest self = Digest::of(text);
  if (!store.contains(self)) problems.push_back("report.json " + self.str() + " is not in the store");
  const Json bundle = parse_json(text, "report.json");
  for (const auto& [field, value] : require_field(bundle, "provenance", "report.json").items()) {
    if (value.is_null()) continue;
    const auto d = Digest::parse(value.get<std::string>());
    if (!d || !store.contains(*d)) {
      problems.push_back("provenance " + field + " does not resolve: " +
                         value.get<std::string>());
    }
  }
  std::sort(problems.begin(), problems.end());
  return problems;
}

}  // namespace certkit
