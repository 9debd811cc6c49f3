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

#ifndef DPFAIR_DATASET_H_
#define DPFAIR_DATASET_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace dpfair {

enum class DataKind {
  // Nonnegative integral counts straight from the data owner.
  kRaw,
  // Output of a mechanism or post-processing; no sign/integrality guarantee.
  kReleased,
};

// n entities by k attributes, stored row-major.
class Dataset {
 public:
  // Validates shape, and for kRaw data that every cell is a finite
  // nonnegative integer.
  static absl::StatusOr<Dataset> Create(std::vector<std::string> entity_ids,
                                        std::vector<std::string> attributes,
                                        std::vector<double> values,
                                        DataKind kind);

  // Single-attribute convenience constructor; ids default to "0".."n-1".
  static absl::StatusOr<Dataset> FromColumn(std::vector<double> column,
                                            std::string attribute,
                                            DataKind kind = DataKind::kRaw);

  size_t num_entities() const { return entity_ids_.size(); }
  size_t num_attributes() const { return attributes_.size(); }
  DataKind kind() const { return kind_; }
  bool is_raw() const { return kind_ == DataKind::kRaw; }

  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::vector<std::string>& attributes() const { return attributes_; }

  double at(size_t entity, size_t attribute) const {
    return values_[entity * attributes_.size() + attribute];
  }
  double& at(size_t entity, size_t attribute) {
    return values_[entity * attributes_.size() + attribute];
  }
  std::span<const double> row(size_t entity) const {
    return {values_.data() + entity * attributes_.size(), attributes_.size()};
  }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  absl::StatusOr<size_t> AttributeIndex(std::string_view name) const;
  std::vector<double> Column(size_t attribute) const;

  // Same ids and attributes, new cell values, marked kReleased.
  Dataset WithReleasedValues(std::vector<double> values) const;

  // Keeps the rows whose index satisfies `keep`, preserving order.
  template <typename Pred>
  Dataset Filter(Pred keep) const {
    Dataset out = *this;
    out.entity_ids_.clear();
    out.values_.clear();
    for (size_t i = 0; i < num_entities(); ++i) {
      if (!keep(i)) continue;
      out.entity_ids_.push_back(entity_ids_[i]);
      auto r = row(i);
      out.values_.insert(out.values_.end(), r.begin(), r.end());
    }
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Dataset() = default;

  std::vector<std::string> entity_ids_;
  std::vector<std::string> attributes_;
  std::vector<double> values_;
  DataKind kind_ = DataKind::kRaw;
};

}  // namespace dpfair

#endif  // DPFAIR_DATASET_H_
