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

#include "dpfair/dataset.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpfair {

absl::StatusOr<Dataset> Dataset::Create(std::vector<std::string> entity_ids,
                                        std::vector<std::string> attributes,
                                        std::vector<double> values,
                                        DataKind kind) {
  if (entity_ids.empty()) {
    return absl::InvalidArgumentError("dataset needs at least one entity");
  }
  if (attributes.empty()) {
    return absl::InvalidArgumentError("dataset needs at least one attribute");
  }
  if (values.size() != entity_ids.size() * attributes.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset shape mismatch: ", values.size(), " cells for ",
        entity_ids.size(), "x", attributes.size()));
  }
  if (kind == DataKind::kRaw) {
    const size_t k = attributes.size();
    for (size_t c = 0; c < values.size(); ++c) {
      const double v = values[c];
      if (!std::isfinite(v) || v < 0 || v != std::floor(v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "raw data must be nonnegative integers; entity '",
            entity_ids[c / k], "' attribute '", attributes[c % k], "' has ",
            v));
      }
    }
  }
  Dataset d;
  d.entity_ids_ = std::move(entity_ids);
  d.attributes_ = std::move(attributes);
  d.values_ = std::move(values);
  d.kind_ = kind;
  return d;
}

absl::StatusOr<Dataset> Dataset::FromColumn(std::vector<double> column,
                                            std::string attribute,
                                            DataKind kind) {
  std::vector<std::string> ids;
  ids.reserve(column.size());
  for (size_t i = 0; i < column.size(); ++i) ids.push_back(absl::StrCat(i));
  return Create(std::move(ids), {std::move(attribute)}, std::move(column),
                kind);
}

absl::StatusOr<size_t> Dataset::AttributeIndex(std::string_view name) const {
  for (size_t j = 0; j < attributes_.size(); ++j) {
    if (attributes_[j] == name) return j;
  }
  return absl::NotFoundError(absl::StrCat("unknown attribute '", std::string(name), "'"));
}

std::vector<double> Dataset::Column(size_t attribute) const {
  std::vector<double> out(num_entities());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at(i, attribute);
  return out;
}

Dataset Dataset::WithReleasedValues(std::vector<double> values) const {
  Dataset out = *this;
  out.values_ = std::move(values);
  out.kind_ = DataKind::kReleased;
  return out;
}

}  // namespace dpfair
