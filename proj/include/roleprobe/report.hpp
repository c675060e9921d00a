/* Copyright 2026 The roleprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Per-layer metric grids and their CSV / JSON / SVG renderings.

#ifndef ROLEPROBE_REPORT_HPP_
#define ROLEPROBE_REPORT_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roleprobe/clause.hpp"

namespace roleprobe {

// accuracy: correct / n. macro_accuracy: mean of the per-role accuracies
// that have instances (equals accuracy for a single role). mean_p_subject:
// mean probe probability of SUBJECT.
inline constexpr std::array<std::string_view, 3> kReportMetrics{"accuracy", "macro_accuracy",
                                                                "mean_p_subject"};
inline constexpr std::array<std::string_view, 3> kReportRoles{"all", "subject", "object"};

struct ReportRow {
  std::string layer_name;
  std::string subset;
  std::string gold_role;
  std::string metric;
  double value = 0.0;  // 0 when n == 0
  std::size_t n = 0;
  bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> layer_names;
  std::vector<std::string> subsets;
  // Full grid, layer-major, then subset, role, metric.
  std::vector<ReportRow> rows;
  nlohmann::json config;
  nlohmann::json provenance;

  const ReportRow& row(std::string_view layer, std::string_view subset, std::string_view role,
                       std::string_view metric) const;
  double value(std::string_view layer, std::string_view subset, std::string_view role,
               std::string_view metric) const {
    return row(layer, subset, role, metric).value;
  }
  std::size_t count(std::string_view layer, std::string_view subset,
                    std::string_view role = "all") const {
    return row(layer, subset, role, "accuracy").n;
  }

  bool operator==(const ExperimentReport& other) const;
};

// Builds the grid. membership[s][i] says whether instance i is in subset s;
// probabilities[l][i] is the layer-l probe's p(SUBJECT) for instance i.
ExperimentReport aggregate_report(std::string experiment, std::vector<std::string> layer_names,
                                  std::vector<std::string> subsets,
                                  std::span<const std::vector<bool>> membership,
                                  std::span<const Role> gold,
                                  std::span<const std::vector<double>> probabilities);

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);

// Columns: experiment, layer_name, subset, gold_role, metric, value, n.
std::string report_csv(std::span<const ExperimentReport> reports);
// Line chart with layers on x: mean p(SUBJECT) per subset and role, or
// accuracy per subset for scramble experiments.
std::string report_svg(const ExperimentReport& r);

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

// Writes report.csv, report.json and <experiment>.svg into `dir`.
void emit_report(std::span<const ExperimentReport> reports, const std::filesystem::path& dir,
                 ReportFormats formats = {});
std::vector<ExperimentReport> read_reports(const std::filesystem::path& json_file);

// `existing` with every experiment in `fresh` replaced or appended, ordered
// by experiment name.
std::vector<ExperimentReport> merge_reports(std::vector<ExperimentReport> existing,
                                            std::span<const ExperimentReport> fresh);

}  // namespace roleprobe

#endif  // ROLEPROBE_REPORT_HPP_
