//
// Copyright 2026 The dpfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfair/report_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"

#ifndef DPFAIR_VERSION
#define DPFAIR_VERSION "0.0.0"
#endif

namespace dpfair {
namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

absl::StatusOr<BiasMode> ModeFromName(const std::string& name) {
  if (name == "signed") return BiasMode::kSigned;
  if (name == "absolute") return BiasMode::kAbsolute;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown bias mode '", name, "'"));
}

absl::StatusOr<Sampling> SamplingFromName(const std::string& name) {
  if (name == "independent") return Sampling::kIndependent;
  if (name == "antithetic") return Sampling::kAntithetic;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sampling '", name, "'"));
}

}  // namespace

const char* Version() { return DPFAIR_VERSION; }

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

nlohmann::json ReportToJson(const FairnessReport& report) {
  nlohmann::json entities = nlohmann::json::array();
  for (const auto& e : report.per_entity) {
    entities.push_back({{"entity_id", e.entity_id},
                        {"true_value", e.true_value},
                        {"expected_private_value", e.expected_private_value},
                        {"bias", e.bias},
                        {"absolute_bias", e.absolute_bias},
                        {"std_error", e.std_error},
                        {"mean_abs_error", e.mean_abs_error},
                        {"samples", e.samples},
                        {"degenerate_rate", e.degenerate_rate}});
  }
  const ReportConfig& c = report.config;
  return {{"version", Version()},
          {"mode", BiasModeName(report.mode)},
          {"alpha", report.alpha},
          {"config",
           {{"epsilon", c.epsilon},
            {"sensitivity", c.sensitivity},
            {"samples", c.samples},
            {"master_seed", c.master_seed},
            {"shard_count", c.shard_count},
            {"sampling", SamplingName(c.sampling)}}},
          {"disparity", report.disparity},
          {"per_entity", entities},
          {"metadata", report.metadata}};
}

absl::StatusOr<FairnessReport> ReportFromJson(const nlohmann::json& j) {
  try {
    FairnessReport report;
    auto mode = ModeFromName(j.at("mode").get<std::string>());
    if (!mode.ok()) return mode.status();
    report.mode = *mode;
    report.alpha = j.at("alpha").get<double>();
    const auto& c = j.at("config");
    report.config.epsilon = c.at("epsilon").get<double>();
    report.config.sensitivity = c.at("sensitivity").get<double>();
    report.config.samples = c.at("samples").get<int64_t>();
    report.config.master_seed = c.at("master_seed").get<uint64_t>();
    report.config.shard_count = c.at("shard_count").get<int>();
    auto sampling = SamplingFromName(c.value("sampling", "independent"));
    if (!sampling.ok()) return sampling.status();
    report.config.sampling = *sampling;
    report.disparity = j.at("disparity").get<std::vector<double>>();
    for (const auto& ej : j.at("per_entity")) {
      BiasEstimate e;
      e.entity_id = ej.at("entity_id").get<std::string>();
      e.true_value = ej.at("true_value").get<double>();
      e.expected_private_value = ej.at("expected_private_value").get<double>();
      e.bias = ej.at("bias").get<double>();
      e.absolute_bias = ej.at("absolute_bias").get<double>();
      e.std_error = ej.at("std_error").get<double>();
      e.mean_abs_error = ej.value("mean_abs_error", 0.0);
      e.samples = ej.at("samples").get<int64_t>();
      e.degenerate_rate = ej.value("degenerate_rate", 0.0);
      report.per_entity.push_back(std::move(e));
    }
    if (report.disparity.size() != report.per_entity.size()) {
      return absl::InvalidArgumentError(
          "disparity and per_entity lengths differ");
    }
    report.metadata = j.value("metadata", nlohmann::json::object());
    return report;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed report: ", e.what()));
  }
}

std::string ReportToCsv(const FairnessReport& report) {
  const auto& pe = report.per_entity;
  std::vector<size_t> order(pe.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return pe[a].true_value < pe[b].true_value;
  });
  std::string out =
      "entity_id,true_value,expected_private_value,bias,abs_bias,std_error,"
      "disparity\n";
  for (size_t i : order) {
    const auto& e = pe[i];
    absl::StrAppend(&out, CsvField(e.entity_id), ",",
                    FormatDouble(e.true_value), ",",
                    FormatDouble(e.expected_private_value), ",",
                    FormatDouble(e.bias), ",", FormatDouble(e.absolute_bias),
                    ",", FormatDouble(e.std_error), ",",
                    FormatDouble(report.disparity[i]), "\n");
  }
  return out;
}

std::string CostOfPrivacyToCsv(const CostOfPrivacyReport& report) {
  const auto& s = report.per_entity_shortfall;
  std::vector<size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return s[a] > s[b]; });
  std::string out = "rank,entity_id,shortfall\n";
  size_t rank = 1;
  for (size_t i : order) {
    absl::StrAppend(&out, rank++, ",", CsvField(report.entity_ids[i]), ",",
                    FormatDouble(s[i]), "\n");
  }
  absl::StrAppend(&out, ",total,", FormatDouble(report.total), "\n");
  return out;
}

std::string AlphaTableToCsv(const std::vector<AlphaRow>& rows) {
  std::string out = "label,epsilon,alpha,pooled_std_error,max_abs_bias\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, CsvField(r.label), ",", FormatDouble(r.epsilon), ",",
                    FormatDouble(r.alpha), ",",
                    FormatDouble(r.pooled_std_error), ",",
                    FormatDouble(r.max_abs_bias), "\n");
  }
  return out;
}

AlphaRow SummarizeReport(std::string label, const FairnessReport& report) {
  AlphaRow row;
  row.label = std::move(label);
  row.epsilon = report.config.epsilon;
  row.alpha = report.alpha;
  row.pooled_std_error = PooledStdError(report);
  for (const auto& e : report.per_entity) {
    row.max_abs_bias = std::max(row.max_abs_bias, e.absolute_bias);
  }
  return row;
}

absl::Status WriteTextFile(const std::string& path, std::string_view content) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      return absl::UnavailableError(
          absl::StrCat("cannot create ", parent.string(), ": ", ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dpfair
