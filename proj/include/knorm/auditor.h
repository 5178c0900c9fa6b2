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

#ifndef KNORM_AUDITOR_H_
#define KNORM_AUDITOR_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "knorm/mechanisms.h"
#include "knorm/polytope.h"
#include "knorm/query_model.h"
#include "knorm/random.h"

namespace knorm {

struct AuditConfig {
  double bin_width = 0.1;
  std::int64_t trials = 1'000'000;
  // A bin fails only when its ratio exceeds bound * (1 + tolerance).
  double tolerance = 0.15;
  // Both histograms need this many counts for a bin to be tested.
  std::int64_t min_bin_count = 200;
  // Width of the Wilson intervals used to confirm a failing bin.
  double wilson_z = 3.0;
};

enum class Verdict { kPass, kFail, kInconclusive };
const char* VerdictName(Verdict v);

// Something that answers queries on a database; only the output is audited.
struct AuditTarget {
  std::string name;
  std::function<absl::StatusOr<Eigen::VectorXd>(const Database&, RngStream&)>
      release;
};

// Wraps a mechanism; the mechanism must outlive the target.
AuditTarget TargetFromMechanism(Mechanism& mechanism);

struct AuditReport {
  std::string mechanism;
  double eps = 0.0;
  double worst_ratio = 0.0;
  // Center of the bin holding worst_ratio.
  double worst_bin = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  int bins_tested = 0;
};

nlohmann::json AuditReportToJson(const AuditReport& report);

// Histograms the first output coordinate under x and x' and compares bin
// frequencies in both directions against e^eps. A bin fails when its ratio
// exceeds e^eps (1 + tolerance) and the ratio of the conservative Wilson
// endpoints still exceeds e^eps. No testable bin gives kInconclusive.
absl::StatusOr<AuditReport> RatioAudit(const AuditTarget& target,
                                       const NeighborPair& pair, double eps,
                                       const AuditConfig& cfg, RngStream& rng);

// The same test against e^{eps k} for databases at l1 distance <= k.
absl::StatusOr<AuditReport> TransitivityCheck(const AuditTarget& target,
                                              const Database& x,
                                              const Database& x_far, double k,
                                              double eps,
                                              const AuditConfig& cfg,
                                              RngStream& rng);

// Greedy packing of lambda K from uniform candidates: a candidate is kept
// when it is at distance >= target from every kept point. Requires
// budget >= 10 e^d.
struct PackingResult {
  std::vector<Eigen::VectorXd> points;
  std::int64_t candidates = 0;
};

absl::StatusOr<PackingResult> GreedyPacking(const PolytopeHandle& handle,
                                            double lambda, double target,
                                            RngStream& rng,
                                            std::int64_t budget);

// Smallest pairwise Euclidean distance; +infinity below two points.
double MinPairwiseDistance(const std::vector<Eigen::VectorXd>& points);

struct PackingCheckConfig {
  // Candidate draws; 0 means max(2000, ceil(10 e^d)).
  std::int64_t budget = 0;
  std::int64_t trials_per_point = 200;
  // Packing points whose preimages are fed to the mechanism.
  int max_points = 32;
};

struct PackingReport {
  Verdict verdict = Verdict::kInconclusive;
  double lambda = 0.0;
  // Largest radius whose packing beats the size threshold.
  double rho = 0.0;
  std::int64_t packing_size = 0;
  double required_size = 0.0;
  // rho / 4: no eps-private mechanism can have smaller error on every
  // preimage.
  double lower_bound = 0.0;
  double measured_error = 0.0;
};

// Packs lambda K with lambda = d / (2 eps) at the largest radius rho whose
// greedy packing has more than 2 e^{d/2} points. If a mechanism had
// expected error below rho/4 on every preimage, the disjoint balls of
// radius rho/2 would each carry mass >= e^{-d/2}/2 under the zero database,
// which sums past 1. Passes when the measured worst error is >= rho/4.
absl::StatusOr<PackingReport> PackingErrorCheck(const AuditTarget& target,
                                                const QueryMatrix& f,
                                                double eps, RngStream& rng,
                                                const PackingCheckConfig& cfg =
                                                    {});

// A finite instance for the exact optimal-mechanism LP.
struct TinyInstance {
  std::vector<Eigen::VectorXd> databases;
  // F(x) for each database; err(x, a) = ||a - F(x)||_2.
  std::vector<Eigen::VectorXd> query_values;
  std::vector<Eigen::VectorXd> answers;
  // Pairwise database distances; empty means l1 between `databases`.
  Eigen::MatrixXd distances;
};

// {"databases": [[..]..], "query_values": [[..]..], "answers": [[..]..],
//  "distances": [[..]..] (optional)}.
absl::StatusOr<TinyInstance> TinyInstanceFromJson(const nlohmann::json& j);

struct LpReport {
  double optimum = 0.0;
  // mu(x, a): rows are databases, columns answers.
  Eigen::MatrixXd mu;
  int variables = 0;
  std::int64_t pivots = 0;
};

inline constexpr int kDefaultLpCap = 10'000;

// min t s.t. sum_a mu(x,a) err(x,a) <= t for all x,
//            mu(x,a) <= e^{eps dist(x,x')} mu(x',a),
//            sum_a mu(x,a) = 1, mu >= 0.
absl::StatusOr<LpReport> LpOptimalError(const TinyInstance& instance,
                                        double eps,
                                        int max_variables = kDefaultLpCap);

nlohmann::json LpReportToJson(const LpReport& report);

// max_x sum_a mu(x,a) err(x,a).
double WorstCaseExpectedError(const TinyInstance& instance,
                              const Eigen::MatrixXd& mu);

// mu(x,a) proportional to exp(-eps score(x,a)) over the answer set.
Eigen::MatrixXd ExponentialMechanismTable(
    const TinyInstance& instance, double eps,
    const std::function<double(int x, int a)>& score);

}  // namespace knorm

#endif  // KNORM_AUDITOR_H_
