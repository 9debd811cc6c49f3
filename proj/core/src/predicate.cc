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

#include "dpfair/predicate.h"

#include <array>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

constexpr size_t kMaxStackDepth = 64;

absl::Status CheckAttribute(const std::string& name,
                            const std::vector<std::string>& attributes) {
  for (const auto& a : attributes) {
    if (a == name) return absl::OkStatus();
  }
  return absl::NotFoundError(
      absl::StrCat("predicate references unknown attribute '", name, "'"));
}

size_t IndexOf(const std::string& name,
               const std::vector<std::string>& attributes) {
  for (size_t j = 0; j < attributes.size(); ++j) {
    if (attributes[j] == name) return j;
  }
  return attributes.size();
}

absl::StatusOr<Comparator> ParseComparator(const nlohmann::json& j) {
  if (!j.is_string()) {
    return absl::InvalidArgumentError("\"cmp\" must be \">\" or \">=\"");
  }
  const auto s = j.get<std::string>();
  if (s == ">") return Comparator::kGreater;
  if (s == ">=") return Comparator::kGreaterEqual;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown comparator '", s, "'"));
}

absl::StatusOr<double> ParseLevel(const nlohmann::json& j) {
  if (!j.contains("level") || !j["level"].is_number()) {
    return absl::InvalidArgumentError("predicate leaf needs numeric \"level\"");
  }
  return j["level"].get<double>();
}

absl::StatusOr<std::string> ParseName(const nlohmann::json& j,
                                      const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("predicate leaf needs string \"", key, "\""));
  }
  return j[key].get<std::string>();
}

size_t StackDepth(const Predicate& p) {
  const auto* c = std::get_if<Predicate::Composite>(&p.node());
  if (c == nullptr) return 1;
  return std::max(StackDepth(c->lhs), StackDepth(c->rhs) + 1);
}

}  // namespace

const char* ComparatorSymbol(Comparator cmp) {
  return cmp == Comparator::kGreater ? ">" : ">=";
}

const char* BoolOpName(BoolOp op) {
  switch (op) {
    case BoolOp::kAnd:
      return "and";
    case BoolOp::kOr:
      return "or";
    case BoolOp::kXor:
      return "xor";
  }
  return "?";
}

Predicate Predicate::Leaf(CountThreshold leaf) {
  return Predicate(std::make_shared<const Node>(std::move(leaf)));
}

Predicate Predicate::Leaf(RatioThreshold leaf) {
  return Predicate(std::make_shared<const Node>(std::move(leaf)));
}

Predicate Predicate::Combine(BoolOp op, Predicate lhs, Predicate rhs) {
  return Predicate(std::make_shared<const Node>(
      Composite{op, std::move(lhs), std::move(rhs)}));
}

bool operator==(const Predicate& a, const Predicate& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (const auto* ca = std::get_if<CountThreshold>(&na)) {
    return *ca == std::get<CountThreshold>(nb);
  }
  if (const auto* ra = std::get_if<RatioThreshold>(&na)) {
    return *ra == std::get<RatioThreshold>(nb);
  }
  const auto& xa = std::get<Predicate::Composite>(na);
  const auto& xb = std::get<Predicate::Composite>(nb);
  return xa.op == xb.op && xa.lhs == xb.lhs && xa.rhs == xb.rhs;
}

absl::Status Predicate::Validate(
    const std::vector<std::string>& attributes) const {
  if (const auto* c = std::get_if<CountThreshold>(node_.get())) {
    if (!std::isfinite(c->level)) {
      return absl::InvalidArgumentError("threshold level must be finite");
    }
    return CheckAttribute(c->attribute, attributes);
  }
  if (const auto* r = std::get_if<RatioThreshold>(node_.get())) {
    if (!std::isfinite(r->level)) {
      return absl::InvalidArgumentError("ratio level must be finite");
    }
    if (r->proportion && (r->level < 0 || r->level > 1)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "proportion level must lie in [0, 1], got ", r->level));
    }
    if (auto s = CheckAttribute(r->numerator, attributes); !s.ok()) return s;
    return CheckAttribute(r->denominator, attributes);
  }
  const auto& comp = std::get<Composite>(*node_);
  if (auto s = comp.lhs.Validate(attributes); !s.ok()) return s;
  return comp.rhs.Validate(attributes);
}

nlohmann::json Predicate::ToJson() const {
  nlohmann::json j;
  if (const auto* c = std::get_if<CountThreshold>(node_.get())) {
    j["leaf"] = "count";
    j["attr"] = c->attribute;
    j["level"] = c->level;
    j["cmp"] = ComparatorSymbol(c->cmp);
    return j;
  }
  if (const auto* r = std::get_if<RatioThreshold>(node_.get())) {
    j["leaf"] = "ratio";
    j["num"] = r->numerator;
    j["den"] = r->denominator;
    j["level"] = r->level;
    j["cmp"] = ComparatorSymbol(r->cmp);
    if (r->proportion) j["proportion"] = true;
    return j;
  }
  const auto& comp = std::get<Composite>(*node_);
  j["op"] = BoolOpName(comp.op);
  j["l"] = comp.lhs.ToJson();
  j["r"] = comp.rhs.ToJson();
  return j;
}

absl::StatusOr<Predicate> Predicate::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("predicate node must be a JSON object");
  }
  if (j.contains("op")) {
    if (!j["op"].is_string()) {
      return absl::InvalidArgumentError("\"op\" must be a string");
    }
    const auto name = j["op"].get<std::string>();
    BoolOp op;
    if (name == "and") {
      op = BoolOp::kAnd;
    } else if (name == "or") {
      op = BoolOp::kOr;
    } else if (name == "xor") {
      op = BoolOp::kXor;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown predicate operator '", name, "'"));
    }
    if (!j.contains("l") || !j.contains("r")) {
      return absl::InvalidArgumentError(
          absl::StrCat("operator '", name, "' needs \"l\" and \"r\""));
    }
    auto lhs = FromJson(j["l"]);
    if (!lhs.ok()) return lhs.status();
    auto rhs = FromJson(j["r"]);
    if (!rhs.ok()) return rhs.status();
    return Combine(op, *std::move(lhs), *std::move(rhs));
  }
  if (!j.contains("leaf") || !j["leaf"].is_string()) {
    return absl::InvalidArgumentError(
        "predicate node needs either \"op\" or \"leaf\"");
  }
  const auto kind = j["leaf"].get<std::string>();
  auto level = ParseLevel(j);
  if (!level.ok()) return level.status();
  auto cmp = ParseComparator(j.value("cmp", nlohmann::json(">=")));
  if (!cmp.ok()) return cmp.status();
  if (kind == "count") {
    auto attr = ParseName(j, "attr");
    if (!attr.ok()) return attr.status();
    return Leaf(CountThreshold{*std::move(attr), *level, *cmp});
  }
  if (kind == "ratio") {
    auto num = ParseName(j, "num");
    if (!num.ok()) return num.status();
    auto den = ParseName(j, "den");
    if (!den.ok()) return den.status();
    RatioThreshold leaf{*std::move(num), *std::move(den), *level, *cmp,
                        j.value("proportion", false)};
    return Leaf(std::move(leaf));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown predicate leaf '", kind, "'"));
}

void BoundPredicate::Compile(const Predicate& p,
                             const std::vector<std::string>& attributes,
                             std::vector<Instr>& program) {
  const auto& node = p.node();
  if (const auto* c = std::get_if<CountThreshold>(&node)) {
    program.push_back({Instr::kCount, IndexOf(c->attribute, attributes), 0,
                       c->level, c->cmp});
    return;
  }
  if (const auto* r = std::get_if<RatioThreshold>(&node)) {
    program.push_back({Instr::kRatio, IndexOf(r->numerator, attributes),
                       IndexOf(r->denominator, attributes), r->level, r->cmp});
    return;
  }
  const auto& comp = std::get<Predicate::Composite>(node);
  Compile(comp.lhs, attributes, program);
  Compile(comp.rhs, attributes, program);
  Instr::Kind kind = Instr::kAnd;
  if (comp.op == BoolOp::kOr) kind = Instr::kOr;
  if (comp.op == BoolOp::kXor) kind = Instr::kXor;
  program.push_back({kind});
}

absl::StatusOr<BoundPredicate> BoundPredicate::Bind(
    const Predicate& predicate, const std::vector<std::string>& attributes) {
  if (auto s = predicate.Validate(attributes); !s.ok()) return s;
  BoundPredicate bound;
  bound.depth_ = StackDepth(predicate);
  if (bound.depth_ > kMaxStackDepth) {
    return absl::InvalidArgumentError(
        absl::StrCat("predicate nests deeper than ", kMaxStackDepth));
  }
  Compile(predicate, attributes, bound.program_);
  return bound;
}

Decision BoundPredicate::Evaluate(std::span<const double> row) const {
  std::array<bool, kMaxStackDepth> stack;
  size_t top = 0;
  bool degenerate = false;
  for (const Instr& in : program_) {
    switch (in.kind) {
      case Instr::kCount:
        stack[top++] = Compare(row[in.a], in.level, in.cmp);
        break;
      case Instr::kRatio: {
        const double den = row[in.b];
        if (den <= 0) {
          degenerate = true;
          stack[top++] = false;
        } else {
          stack[top++] = Compare(row[in.a] / den, in.level, in.cmp);
        }
        break;
      }
      case Instr::kAnd:
        --top;
        stack[top - 1] = stack[top - 1] && stack[top];
        break;
      case Instr::kOr:
        --top;
        stack[top - 1] = stack[top - 1] || stack[top];
        break;
      case Instr::kXor:
        --top;
        stack[top - 1] = stack[top - 1] != stack[top];
        break;
    }
  }
  return {stack[0], degenerate};
}

absl::StatusOr<Decision> EvalPredicate(const Predicate& pred,
                                       const Dataset& data, size_t i) {
  if (i >= data.num_entities()) {
    return absl::OutOfRangeError(absl::StrCat("entity index ", i,
                                              " out of range"));
  }
  auto bound = BoundPredicate::Bind(pred, data.attributes());
  if (!bound.ok()) return bound.status();
  return bound->Evaluate(data.row(i));
}

Predicate LanguageAssistanceRule(const std::string& x_s,
                                 const std::string& x_sp,
                                 const std::string& x_spe) {
  auto share = Predicate::Leaf(
      RatioThreshold{x_sp, x_s, 0.05, Comparator::kGreater, true});
  auto volume = Predicate::Leaf(CountThreshold{x_sp, 1e4, Comparator::kGreater});
  auto literacy = Predicate::Leaf(
      RatioThreshold{x_spe, x_sp, 0.0131, Comparator::kGreater, true});
  return Predicate::Combine(
      BoolOp::kAnd, Predicate::Combine(BoolOp::kOr, share, volume), literacy);
}

}  // namespace dpfair
