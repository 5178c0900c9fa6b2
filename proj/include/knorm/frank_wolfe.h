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

#ifndef KNORM_FRANK_WOLFE_H_
#define KNORM_FRANK_WOLFE_H_

#include <cstdint>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "knorm/query_model.h"

namespace knorm {

// Euclidean distance from a to rK = F (r B_1^n), computed by away-step
// Frank-Wolfe over the scaled l1 ball. The linear oracle is a signed
// coordinate vector, so each iteration costs one product with F^T.
//
// Every iterate carries a certified bracket lower <= dist <= upper: upper is
// the current residual and lower comes from the support function of rK in
// the residual direction.
struct DistanceResult {
  // The reported distance; equals `upper`.
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t iterations = 0;
};

// Default iteration cap, 10 d n / eta^2 clamped to [1e4, 1e7].
std::int64_t DefaultIterationCap(int d, int n, double eta);

// Stops once upper <= eta or upper - lower <= eta. The value then satisfies
// 0 <= value <= dist + eta. Returns ResourceExhausted at the cap.
absl::StatusOr<DistanceResult> L1DistanceToImage(const RowMatrix& f,
                                                 const Eigen::VectorXd& a,
                                                 double r, double eta = 1e-3,
                                                 std::int64_t max_iterations = 0);

enum class ThresholdSide { kBelow, kAbove, kBand };

// Decides dist(a, rK) against `threshold`: kBelow certifies
// dist <= threshold, kAbove certifies dist > threshold. kBand means the
// certified bracket still straddles the threshold once it is narrower than
// eta, or when the iteration cap runs out.
absl::StatusOr<ThresholdSide> DistanceThresholdTest(
    const RowMatrix& f, const Eigen::VectorXd& a, double r, double threshold,
    double eta = 1e-3, std::int64_t max_iterations = 0);

}  // namespace knorm

#endif  // KNORM_FRANK_WOLFE_H_
