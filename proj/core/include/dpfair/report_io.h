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

#ifndef DPFAIR_REPORT_IO_H_
#define DPFAIR_REPORT_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/fairness.h"
#include "dpfair/mitigation.h"
#include "nlohmann/json.hpp"

namespace dpfair {

// Toolkit version embedded in every emitted report.
const char* Version();

// Shortest decimal string that parses back to exactly `v`.
std::string FormatDouble(double v);

nlohmann::json ReportToJson(const FairnessReport& report);
absl::StatusOr<FairnessReport> ReportFromJson(const nlohmann::json& j);

// Plot data, one row per entity sorted by true value (ties keep entity
// order):
//   entity_id,true_value,expected_private_value,bias,abs_bias,std_error,
//   disparity
std::string ReportToCsv(const FairnessReport& report);

// Entities ranked by shortfall, largest first:
//   rank,entity_id,shortfall
// followed by a trailing "total" row.
std::string CostOfPrivacyToCsv(const CostOfPrivacyReport& report);

struct AlphaRow {
  std::string label;
  double epsilon = 0;
  double alpha = 0;
  double pooled_std_error = 0;
  double max_abs_bias = 0;
};

// label,epsilon,alpha,pooled_std_error,max_abs_bias
std::string AlphaTableToCsv(const std::vector<AlphaRow>& rows);

AlphaRow SummarizeReport(std::string label, const FairnessReport& report);

absl::Status WriteTextFile(const std::string& path, std::string_view content);
absl::StatusOr<std::string> ReadTextFile(const std::string& path);

}  // namespace dpfair

#endif  // DPFAIR_REPORT_IO_H_
