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

#ifndef DPFAIR_INGEST_H_
#define DPFAIR_INGEST_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"

namespace dpfair {

struct IngestOptions {
  // Allotment files: drop rows whose count is below this value.
  std::optional<int64_t> min_count;
  // Minority files: drop counties with x_sp < 1.
  bool require_minority_population = false;
};

struct IngestResult {
  Dataset data;
  // Allotment files only; all ones when the file has no weight column.
  std::vector<double> weights;
  // Rows with an empty or NULL/NA field.
  int64_t dropped_missing = 0;
  // Rows removed by the options' filters.
  int64_t dropped_filtered = 0;
  std::vector<std::string> warnings;
};

// `district_id,count[,weight]`. Malformed numbers fail with the line number;
// negative or fractional counts are rejected since raw counts must be
// nonnegative integers.
absl::StatusOr<IngestResult> ParseAllotmentCsv(std::istream& in,
                                               const IngestOptions& options);
absl::StatusOr<IngestResult> LoadAllotmentCsv(const std::string& path,
                                              const IngestOptions& options);

// `county_id,x_s,x_sp,x_spe`; attributes keep the header names.
absl::StatusOr<IngestResult> ParseMinorityCsv(std::istream& in,
                                              const IngestOptions& options);
absl::StatusOr<IngestResult> LoadMinorityCsv(const std::string& path,
                                             const IngestOptions& options);

}  // namespace dpfair

#endif  // DPFAIR_INGEST_H_
