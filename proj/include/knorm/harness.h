//
// Copyright 2026 The KNorm Authors
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

#ifndef KNORM_HARNESS_H_
#define KNORM_HARNESS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "knorm/samplers.h"

namespace knorm {

// Keys of the flat key=value config file match the field names. Lists are
// comma-separated.
struct ExperimentConfig {
  std::vector<int> dims;
  int n = 0;
  double eps = 1.0;
  // Used by the gaussian mechanism and the gauss_ref column.
  double delta = 0.1;
  std::vector<std::string> mechanisms;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  SamplerChoice sampler = SamplerChoice::kAuto;
  // CSV path; a JSON mirror is written next to it. Empty: no files.
  std::string output;

  // Optional grid-walk overrides (0 keeps the per-d defaults).
  double walk_beta = 0.0;
  std::int64_t walk_steps = 0;
  std::int64_t walk_burn_in = 0;
  std::int64_t walk_thin = 0;
  // Database file; empty means x = 0.
  std::string database;
  // Monte Carlo trials behind the vol_lb / gvol_lb columns; 0 skips them.
  std::int64_t bound_trials = 200'000;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::istream& in);
absl::StatusOr<ExperimentConfig> ReadExperimentConfigFile(
    const std::string& path);
absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg);

struct ResultRow {
  int d = 0;
  int n = 0;
  double eps = 0.0;
  std::string mechanism;
  std::int64_t trials = 0;
  double mean_error = 0.0;
  // Standard deviation of the per-trial l2 error.
  double std_error = 0.0;
  double vol_lb = 0.0;
  double gvol_lb = 0.0;
  double knorm_ref = 0.0;
  double laplace_ref = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  // Non-empty when the cell failed; the numeric fields are then unset.
  std::string error;
};

// One row per (d, mechanism) in config order. A random Bernoulli F is drawn
// for each d and shared by that d's mechanisms; each cell has its own stream
// derived from (seed, cell index). Cell failures are recorded in the row.
absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& cfg);

// Wall time is left out of the CSV so equal seeds give identical bytes.
void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out);
nlohmann::json ResultsToJson(const std::vector<ResultRow>& rows);

struct TrendReport {
  // Per d, ascending.
  std::vector<int> dims;
  std::vector<double> knorm_ratio;
  std::vector<double> laplace_ratio;
  // max / min of knorm_ratio.
  double knorm_spread = 0.0;
  double laplace_spread = 0.0;
  bool laplace_increasing = false;
  bool pass = false;
};

// Needs at least three distinct d values carrying a "knorm" and a "laplace"
// row. PASS when the knorm spread is <= 2.5 and the Laplace ratio to
// knorm_ref increases strictly with d.
absl::StatusOr<TrendReport> CompareToTheory(const std::vector<ResultRow>& rows);
nlohmann::json TrendReportToJson(const TrendReport& report);

}  // namespace knorm

#endif  // KNORM_HARNESS_H_
