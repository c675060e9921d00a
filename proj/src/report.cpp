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

#include "roleprobe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "roleprobe/error.hpp"

namespace roleprobe {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

const ReportRow& ExperimentReport::row(std::string_view layer, std::string_view subset,
                                       std::string_view role, std::string_view metric) const {
  for (const ReportRow& r : rows) {
    if (r.layer_name == layer && r.subset == subset && r.gold_role == role && r.metric == metric) {
      return r;
    }
  }
  throw ConfigError("report " + experiment + " has no row " + std::string(layer) + "/" +
                    std::string(subset) + "/" + std::string(role) + "/" + std::string(metric));
}

bool ExperimentReport::operator==(const ExperimentReport& other) const {
  return experiment == other.experiment && layer_names == other.layer_names &&
         subsets == other.subsets && rows == other.rows && config == other.config &&
         provenance == other.provenance;
}

ExperimentReport aggregate_report(std::string experiment, std::vector<std::string> layer_names,
                                  std::vector<std::string> subsets,
                                  std::span<const std::vector<bool>> membership,
                                  std::span<const Role> gold,
                                  std::span<const std::vector<double>> probabilities) {
  if (membership.size() != subsets.size() || probabilities.size() != layer_names.size()) {
    throw ShapeError("report inputs disagree with their names");
  }
  for (const auto& m : membership) {
    if (m.size() != gold.size()) throw ShapeError("subset mask has the wrong length");
  }
  for (const auto& p : probabilities) {
    if (p.size() != gold.size()) throw ShapeError("probability column has the wrong length");
  }
  ExperimentReport r;
  r.experiment = std::move(experiment);
  r.layer_names = std::move(layer_names);
  r.subsets = std::move(subsets);
  r.rows.reserve(r.layer_names.size() * r.subsets.size() * kReportRoles.size() *
                 kReportMetrics.size());

  struct Tally {
    std::size_t n = 0;
    std::size_t correct = 0;
    double p_sum = 0.0;
    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
  };

  for (std::size_t l = 0; l < r.layer_names.size(); ++l) {
    for (std::size_t s = 0; s < r.subsets.size(); ++s) {
      Tally subj, obj;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        if (!membership[s][i]) continue;
        const double p = probabilities[l][i];
        const bool says_subject = p > 0.5;
        Tally& t = gold[i] == Role::kSubject ? subj : obj;
        ++t.n;
        t.correct += says_subject == (gold[i] == Role::kSubject);
        t.p_sum += p;
      }
      for (std::string_view role : kReportRoles) {
        Tally t;
        double macro = 0.0;
        if (role == "subject") {
          t = subj;
          macro = t.accuracy();
        } else if (role == "object") {
          t = obj;
          macro = t.accuracy();
        } else {
          t = {subj.n + obj.n, subj.correct + obj.correct, subj.p_sum + obj.p_sum};
          const int present = (subj.n > 0) + (obj.n > 0);
          if (present) macro = (subj.accuracy() + obj.accuracy()) / present;
        }
        const double mean_p = t.n ? t.p_sum / static_cast<double>(t.n) : 0.0;
        const double values[] = {t.accuracy(), macro, mean_p};
        for (std::size_t m = 0; m < kReportMetrics.size(); ++m) {
          r.rows.push_back({r.layer_names[l], r.subsets[s], std::string(role),
                            std::string(kReportMetrics[m]), values[m], t.n});
        }
      }
    }
  }
  return r;
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : r.rows) {
    rows.push_back({{"layer_name", row.layer_name},
                    {"subset", row.subset},
                    {"gold_role", row.gold_role},
                    {"metric", row.metric},
                    {"value", row.value},
                    {"n", row.n}});
  }
  return {{"experiment", r.experiment}, {"layer_names", r.layer_names},
          {"subsets", r.subsets},       {"rows", rows},
          {"config", r.config},         {"provenance", r.provenance}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    r.experiment = j.at("experiment").get<std::string>();
    r.layer_names = j.at("layer_names").get<std::vector<std::string>>();
    r.subsets = j.at("subsets").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      r.rows.push_back({row.at("layer_name").get<std::string>(), row.at("subset").get<std::string>(),
                        row.at("gold_role").get<std::string>(), row.at("metric").get<std::string>(),
                        row.at("value").get<double>(), row.at("n").get<std::size_t>()});
    }
    r.config = j.value("config", nlohmann::json::object());
    r.provenance = j.value("provenance", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string report_csv(std::span<const ExperimentReport> reports) {
  std::string out = "experiment,layer_name,subset,gold_role,metric,value,n\n";
  for (const ExperimentReport& r : reports) {
    for (const ReportRow& row : r.rows) {
      out += csv_field(r.experiment) + ',' + csv_field(row.layer_name) + ',' +
             csv_field(row.subset) + ',' + csv_field(row.gold_role) + ',' + row.metric + ',' +
             format_double(row.value) + ',' + std::to_string(row.n) + '\n';
    }
  }
  return out;
}

std::string report_svg(const ExperimentReport& r) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 170, kTop = 30,
                   kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const bool accuracy_chart = r.experiment == "exp3";
  const std::size_t layers = r.layer_names.size();
  auto x_at = [&](std::size_t l) {
    return kLeft + (layers > 1 ? plot_w * static_cast<double>(l) / static_cast<double>(layers - 1)
                               : plot_w / 2);
  };
  auto y_at = [&](double v) { return kTop + plot_h * (1.0 - v); };

  struct Series {
    std::string label;
    std::string subset;
    std::string role;
  };
  std::vector<Series> series;
  for (const std::string& s : r.subsets) {
    if (accuracy_chart) {
      series.push_back({s, s, "all"});
    } else if (s != "all") {
      series.push_back({s + " subject", s, "subject"});
      series.push_back({s + " object", s, "object"});
    }
  }
  if (series.empty()) series.push_back({"all", "all", "all"});
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << kLeft << "\" y=\"18\" font-size=\"13\">" << r.experiment << ": "
      << (accuracy_chart ? "accuracy" : "mean p(subject)") << " by layer</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << y_at(v)
        << "\" y2=\"" << y_at(v) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y_at(v) + 4 << "\" text-anchor=\"end\">" << v
        << "</text>\n";
  }
  for (std::size_t l = 0; l < layers; ++l) {
    svg << "<text x=\"" << x_at(l) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << r.layer_names[l] << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">layer</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    const std::string_view metric = accuracy_chart ? "accuracy" : "mean_p_subject";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t l = 0; l < layers; ++l) {
      const double v = r.value(r.layer_names[l], series[k].subset, series[k].role, metric);
      svg << (l ? " " : "") << x_at(l) << ',' << y_at(std::clamp(v, 0.0, 1.0));
    }
    svg << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k) + 8;
    svg << "<line x1=\"" << kLeft + plot_w + 12 << "\" x2=\"" << kLeft + plot_w + 32
        << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly + 4 << "\">" << series[k].label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_report(std::span<const ExperimentReport> reports, const std::filesystem::path& dir,
                 ReportFormats formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (formats.csv) write_file(dir / "report.csv", report_csv(reports));
  if (formats.json) {
    nlohmann::json j = {{"format_version", 1}, {"reports", nlohmann::json::array()}};
    for (const ExperimentReport& r : reports) j["reports"].push_back(report_to_json(r));
    write_file(dir / "report.json", j.dump(1) + "\n");
  }
  if (formats.svg) {
    for (const ExperimentReport& r : reports) write_file(dir / (r.experiment + ".svg"), report_svg(r));
  }
}

std::vector<ExperimentReport> read_reports(const std::filesystem::path& json_file) {
  std::ifstream in(json_file, std::ios::binary);
  if (!in) throw IoError("cannot open " + json_file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report " + json_file.string() + ": " + e.what());
  }
  std::vector<ExperimentReport> out;
  if (j.contains("reports")) {
    for (const auto& r : j.at("reports")) out.push_back(report_from_json(r));
  } else {
    out.push_back(report_from_json(j));
  }
  return out;
}

std::vector<ExperimentReport> merge_reports(std::vector<ExperimentReport> existing,
                                            std::span<const ExperimentReport> fresh) {
  for (const ExperimentReport& r : fresh) {
    std::erase_if(existing, [&](const ExperimentReport& e) { return e.experiment == r.experiment; });
    existing.push_back(r);
  }
  std::stable_sort(existing.begin(), existing.end(),
                   [](const ExperimentReport& a, const ExperimentReport& b) { return a.experiment < b.experiment; });
  return existing;
}

}  // namespace roleprobe
