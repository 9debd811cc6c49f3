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

#ifndef DPFAIR_EXPERIMENT_H_
#define DPFAIR_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/estimator.h"
#include "dpfair/fairness.h"
#include "dpfair/ingest.h"
#include "dpfair/mitigation.h"
#include "dpfair/postprocess.h"
#include "dpfair/predicate.h"
#include "dpfair/report_io.h"
#include "nlohmann/json.hpp"

namespace dpfair {

struct CsvSource {
  std::string path;
  // "allotment" or "minority".
  std::string schema = "allotment";
  IngestOptions ingest;
};

struct SyntheticSource {
  nlohmann::json spec;
};

using DataSource = std::variant<CsvSource, SyntheticSource>;

enum class ProblemType { kAllotment, kDecision, kAffine };

struct ProblemSpec {
  ProblemType type = ProblemType::kAllotment;
  // Allotment and affine problems.
  std::string attribute = "count";
  std::optional<std::vector<double>> weights;
  std::optional<double> fixed_normalizer;
  double slope = 1;
  double intercept = 0;
  // Decision problems.
  std::optional<Predicate> predicate;
};

enum class MitigationStrategy {
  kLinearProxy,
  kOutputPerturbation,
  kTemperature,
  kPiecewiseProxy,
};

struct MitigationSpec {
  MitigationStrategy strategy = MitigationStrategy::kLinearProxy;
  // Output perturbation: public lower bound on Z (default 0.9 Z).
  std::optional<double> lower_bound;
  // Temperature: clip level and candidate grid (default log-spaced).
  double level = 0;
  std::vector<double> temperature_grid;
  // Piecewise proxy.
  int groups = 9;
  FitMethod method = FitMethod::kLeastSquares;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DataSource source;
  ProblemSpec problem;
  std::vector<double> epsilons;
  double sensitivity = 1;
  Pipeline pipeline;
  std::optional<double> project_outputs_to;
  EstimatorOptions estimator;
  std::optional<BiasMode> mode;
  bool true_positives_only = false;
  // Budget B for cost-of-privacy tables.
  double budget = 1e6;
  std::optional<MitigationSpec> mitigation;
  std::string out_dir = ".";
};

// Parses and validates the JSON experiment config. All failures are
// InvalidArgument and name the offending field or pipeline step.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const nlohmann::json& j);
nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);

struct ExperimentData {
  Dataset data;
  std::vector<double> weights;
  std::vector<std::string> warnings;
};

absl::StatusOr<ExperimentData> LoadExperimentData(
    const ExperimentConfig& config);

// Checks that the config's attributes exist in the loaded data.
absl::Status ValidateAgainstData(const ExperimentConfig& config,
                                 const ExperimentData& data);

struct ExperimentResult {
  std::vector<std::string> files;
  std::vector<AlphaRow> alpha_table;
  nlohmann::json summary;
};

// Runs every epsilon and writes reports under config.out_dir.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config,
                                               const ExperimentData& data);

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitNumericError = 4;

struct ExperimentOutcome {
  int exit_code = kExitOk;
  absl::Status status;
  nlohmann::json output;
};

struct ExperimentOverrides {
  std::optional<uint64_t> seed;
  std::optional<int64_t> samples;
  std::optional<int> shards;
  std::vector<double> epsilons;
  std::optional<std::string> out_dir;
};

void ApplyOverrides(const ExperimentOverrides& overrides,
                    ExperimentConfig& config);

// Parse, load, validate and run, mapping each stage's failure to its exit
// code. `output` holds the summary or a structured error object.
ExperimentOutcome RunExperimentJson(const nlohmann::json& config_json,
                                    const ExperimentOverrides& overrides);

nlohmann::json ErrorJson(int exit_code, const absl::Status& status);

}  // namespace dpfair

#endif  // DPFAIR_EXPERIMENT_H_
