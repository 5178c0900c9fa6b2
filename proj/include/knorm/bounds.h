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

#ifndef KNORM_BOUNDS_H_
#define KNORM_BOUNDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "knorm/covariance.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/volume.h"

namespace knorm {

inline constexpr char kAlphaAssumption[] =
    "assumes alpha_K = Omega(1) (isotropic constant bounded); not computed";

// eps^-1 d sqrt(d) rho.
double VolLbFromRadius(int d, double eps, double radius);

struct VolLbResult {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  VolumeEstimate volume;
};

// eps^-1 d sqrt(d) vol(K)^{1/d}, with the volume interval propagated.
absl::StatusOr<VolLbResult> VolLb(const QueryMatrix& f, double eps,
                                  RngStream& rng,
                                  std::int64_t trials = 1'000'000);

struct ProjectionTerm {
  int k = 0;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  VolumeEstimate volume;
};

struct BoundReport {
  double eps = 0.0;
  double vol_lb = 0.0;
  VolumeEstimate volume;
  double gvol_lb = 0.0;
  int gvol_k = 0;
  // k = 1..d, projecting onto the top-k covariance eigenvectors. The k = d
  // term is an independent estimate of vol_lb in eigen-coordinates.
  std::vector<ProjectionTerm> per_k;
  std::string alpha_assumption = kAlphaAssumption;
};

// Maximum over k of eps^-1 k sqrt(k) vol_k(P_k K)^{1/k}, where P_k projects
// onto the top-k eigenvectors of `cov`. A lower bound on the supremum over
// all projections. Also fills vol_lb, which enters the maximum as the
// k = d candidate, so gvol_lb >= vol_lb always.
absl::StatusOr<BoundReport> GVolLb(const QueryMatrix& f, double eps,
                                   const CovarianceSummary& cov,
                                   RngStream& rng,
                                   std::int64_t trials = 1'000'000);

nlohmann::json BoundReportToJson(const BoundReport& report);

// Reference curves with all constants set to 1.
struct TheoryCurves {
  double laplace_ref = 0.0;
  // d min(sqrt(d), sqrt(ln(n/d))) / eps.
  double knorm_ref = 0.0;
  // d sqrt(ln(1/delta)) / eps.
  double gauss_ref = 0.0;
};

// Requires 1 <= d <= n/2 and 0 < delta < 1.
absl::StatusOr<TheoryCurves> ComputeTheoryCurves(int d, int n, double eps,
                                                 double delta = 0.1);

}  // namespace knorm

#endif  // KNORM_BOUNDS_H_
