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

#ifndef DPFAIR_PREDICATE_H_
#define DPFAIR_PREDICATE_H_

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "nlohmann/json.hpp"

namespace dpfair {

enum class Comparator { kGreaterEqual, kGreater };
enum class BoolOp { kAnd, kOr, kXor };

// value >= level or value > level.
inline bool Compare(double value, double level, Comparator cmp) {
  return cmp == Comparator::kGreater ? value > level : value >= level;
}

struct CountThreshold {
  std::string attribute;
  double level = 0;
  Comparator cmp = Comparator::kGreaterEqual;

  friend bool operator==(const CountThreshold&,
                         const CountThreshold&) = default;
};

// numerator / denominator compared against `level`. A nonpositive
// denominator (reachable after noising) makes the leaf False and marks the
// evaluation degenerate; the division is never performed.
struct RatioThreshold {
  std::string numerator;
  std::string denominator;
  double level = 0;
  Comparator cmp = Comparator::kGreater;
  // When set, `level` must lie in [0, 1].
  bool proportion = false;

  friend bool operator==(const RatioThreshold&,
                         const RatioThreshold&) = default;
};

// Immutable Boolean expression tree over threshold leaves. Copies share
// structure.
class Predicate {
 public:
  struct Composite;
  using Node = std::variant<CountThreshold, RatioThreshold, Composite>;

  static Predicate Leaf(CountThreshold leaf);
  static Predicate Leaf(RatioThreshold leaf);
  static Predicate Combine(BoolOp op, Predicate lhs, Predicate rhs);

  const Node& node() const;

  // Checks attribute references and level constraints against `attributes`.
  absl::Status Validate(const std::vector<std::string>& attributes) const;

  // Canonical JSON: {"op":"and","l":..,"r":..} for composites and
  // {"leaf":"ratio","num":..,"den":..,"level":..,"cmp":">"} /
  // {"leaf":"count","attr":..,"level":..,"cmp":">="} for leaves.
  nlohmann::json ToJson() const;
  static absl::StatusOr<Predicate> FromJson(const nlohmann::json& j);

  friend bool operator==(const Predicate& a, const Predicate& b);

 private:
  explicit Predicate(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Predicate::Composite {
  BoolOp op;
  Predicate lhs;
  Predicate rhs;
};

inline const Predicate::Node& Predicate::node() const { return *node_; }

struct Decision {
  bool value = false;
  // A ratio leaf met a nonpositive denominator somewhere in the tree.
  bool degenerate = false;
};

// A predicate compiled against a fixed attribute layout. Evaluation walks a
// postfix program and allocates nothing.
class BoundPredicate {
 public:
  static absl::StatusOr<BoundPredicate> Bind(
      const Predicate& predicate, const std::vector<std::string>& attributes);

  Decision Evaluate(std::span<const double> row) const;

 private:
  struct Instr {
    enum Kind { kCount, kRatio, kAnd, kOr, kXor } kind;
    size_t a = 0;
    size_t b = 0;
    double level = 0;
    Comparator cmp = Comparator::kGreaterEqual;
  };
  static void Compile(const Predicate& p,
                      const std::vector<std::string>& attributes,
                      std::vector<Instr>& program);

  std::vector<Instr> program_;
  size_t depth_ = 0;
};

// Evaluates `pred` for entity `i` of `data`.
absl::StatusOr<Decision> EvalPredicate(const Predicate& pred,
                                       const Dataset& data, size_t i);

// The minority-language coverage rule:
//   (x_sp / x_s > 0.05  OR  x_sp > 10^4)  AND  x_spe / x_sp > 0.0131
Predicate LanguageAssistanceRule(const std::string& x_s = "x_s",
                                 const std::string& x_sp = "x_sp",
                                 const std::string& x_spe = "x_spe");

const char* ComparatorSymbol(Comparator cmp);
const char* BoolOpName(BoolOp op);

}  // namespace dpfair

#endif  // DPFAIR_PREDICATE_H_
