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

#ifndef KNORM_LP_H_
#define KNORM_LP_H_

#include <cstdint>

#include <Eigen/Dense>

#include "absl/status/statusor.h"

namespace knorm {

// minimize c^T x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
// Either constraint block may be empty (zero rows) but must have
// c.size() columns.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

struct LpSolution {
  double objective = 0.0;
  Eigen::VectorXd x;
  std::int64_t pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule, so it terminates on
// degenerate problems. Meant for a few thousand variables at most.
// FailedPrecondition when infeasible, OutOfRange when unbounded.
absl::StatusOr<LpSolution> SolveLp(const LpProblem& problem);

}  // namespace knorm

#endif  // KNORM_LP_H_
