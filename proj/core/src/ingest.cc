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

#include "dpfair/ingest.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace dpfair {
namespace {

std::vector<std::string> SplitRow(const std::string& line) {
  std::vector<std::string> fields;
  for (absl::string_view f : absl::StrSplit(line, ',')) {
    f = absl::StripAsciiWhitespace(f);
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') {
      f = f.substr(1, f.size() - 2);
    }
    fields.emplace_back(f);
  }
  return fields;
}

bool IsMissing(const std::string& f) {
  const std::string u = absl::AsciiStrToUpper(f);
  return f.empty() || u == "NULL" || u == "NA" || u == "NAN";
}

// Header-driven table reader shared by both schemas.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int64_t> line_numbers;
  int64_t dropped_missing = 0;
};

absl::StatusOr<Table> ReadTable(std::istream& in,
                                const std::vector<std::string>& required,
                                const std::vector<std::string>& optional) {
  Table t;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!absl::StripAsciiWhitespace(line).empty()) break;
  }
  if (line_no == 0 || absl::StripAsciiWhitespace(line).empty()) {
    return absl::InvalidArgumentError("empty file: missing header row");
  }
  const std::vector<std::string> header = SplitRow(line);
  std::vector<std::string> wanted = required;
  for (const auto& name : required) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": header lacks column '", name, "'"));
    }
  }
  for (const auto& name : optional) {
    if (std::find(header.begin(), header.end(), name) != header.end()) {
      wanted.push_back(name);
    }
  }
  std::vector<size_t> index;
  for (const auto& name : wanted) {
    index.push_back(static_cast<size_t>(
        std::find(header.begin(), header.end(), name) - header.begin()));
  }
  t.header = wanted;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const auto fields = SplitRow(line);
    std::vector<std::string> row;
    bool missing = false;
    for (size_t k : index) {
      if (k >= fields.size() || IsMissing(fields[k])) {
        missing = true;
        break;
      }
      row.push_back(fields[k]);
    }
    if (missing) {
      ++t.dropped_missing;
      continue;
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  return t;
}

absl::StatusOr<double> ParseCount(const std::string& field, int64_t line,
                                  const std::string& column) {
  double v;
  if (!absl::SimpleAtod(field, &v) || !std::isfinite(v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line, ": malformed ", column, " '", field, "'"));
  }
  if (v < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line, ": negative ", column, " ", field,
        " (raw counts must be nonnegative)"));
  }
  if (v != std::floor(v)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line, ": ", column, " ", field, " is not an integer"));
  }
  return v;
}

absl::StatusOr<std::ifstream> Open(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return in;
}

void NoteDrops(IngestResult& r) {
  if (r.dropped_missing > 0) {
    r.warnings.push_back(absl::StrCat("dropped ", r.dropped_missing,
                                      " rows with missing fields"));
  }
  if (r.dropped_filtered > 0) {
    r.warnings.push_back(
        absl::StrCat("filtered out ", r.dropped_filtered, " rows"));
  }
}

}  // namespace

absl::StatusOr<IngestResult> ParseAllotmentCsv(std::istream& in,
                                               const IngestOptions& options) {
  auto table = ReadTable(in, {"district_id", "count"}, {"weight"});
  if (!table.ok()) return table.status();
  const bool has_weight = table->header.size() == 3;
  std::vector<std::string> ids;
  std::vector<double> counts, weights;
  int64_t filtered = 0;
  for (size_t r = 0; r < table->rows.size(); ++r) {
    const auto& row = table->rows[r];
    const int64_t line = table->line_numbers[r];
    auto count = ParseCount(row[1], line, "count");
    if (!count.ok()) return count.status();
    double w = 1.0;
    if (has_weight) {
      if (!absl::SimpleAtod(row[2], &w) || !std::isfinite(w) || w <= 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line, ": weight must be a positive number, got '",
            row[2], "'"));
      }
    }
    if (options.min_count && *count < static_cast<double>(*options.min_count)) {
      ++filtered;
      continue;
    }
    ids.push_back(row[0]);
    counts.push_back(*count);
    weights.push_back(w);
  }
  auto data = Dataset::Create(std::move(ids), {"count"}, std::move(counts),
                              DataKind::kRaw);
  if (!data.ok()) return data.status();
  IngestResult result{std::move(*data), std::move(weights),
                      table->dropped_missing, filtered, {}};
  NoteDrops(result);
  return result;
}

absl::StatusOr<IngestResult> LoadAllotmentCsv(const std::string& path,
                                              const IngestOptions& options) {
  auto in = Open(path);
  if (!in.ok()) return in.status();
  return ParseAllotmentCsv(*in, options);
}

absl::StatusOr<IngestResult> ParseMinorityCsv(std::istream& in,
                                              const IngestOptions& options) {
  const std::vector<std::string> cols = {"x_s", "x_sp", "x_spe"};
  auto table = ReadTable(in, {"county_id", "x_s", "x_sp", "x_spe"}, {});
  if (!table.ok()) return table.status();
  std::vector<std::string> ids;
  std::vector<double> values;
  int64_t filtered = 0;
  for (size_t r = 0; r < table->rows.size(); ++r) {
    const auto& row = table->rows[r];
    double v[3];
    for (size_t k = 0; k < 3; ++k) {
      auto c = ParseCount(row[k + 1], table->line_numbers[r], cols[k]);
      if (!c.ok()) return c.status();
      v[k] = *c;
    }
    if (options.require_minority_population && v[1] < 1) {
      ++filtered;
      continue;
    }
    ids.push_back(row[0]);
    values.insert(values.end(), v, v + 3);
  }
  auto data = Dataset::Create(std::move(ids), cols, std::move(values),
                              DataKind::kRaw);
  if (!data.ok()) return data.status();
  IngestResult result{std::move(*data), {}, table->dropped_missing, filtered,
                      {}};
  NoteDrops(result);
  return result;
}

absl::StatusOr<IngestResult> LoadMinorityCsv(const std::string& path,
                                             const IngestOptions& options) {
  auto in = Open(path);
  if (!in.ok()) return in.status();
  return ParseMinorityCsv(*in, options);
}

}  // namespace dpfair
