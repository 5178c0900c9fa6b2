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

#ifndef KNORM_GAUGE_H_
#define KNORM_GAUGE_H_

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "knorm/query_model.h"

namespace knorm {

// Exact Minkowski gauge of K = F B_1^n:
//
//   ||a||_K = min { ||x||_1 : Fx = a } = max { <a, y> : |<f_j, y>| <= 1 }.
//
// The dual is solved by an active-set simplex over the polar body. Its
// feasible region does not depend on `a`, so the last optimal vertex is a
// valid warm start for the next query; walks that move a little between
// queries usually need zero or one pivot.
//
// Within() first tries two certificates that cost O(d^2): the current basis
// gives a feasible preimage (upper bound on the gauge) and any cached polar
// point gives a lower bound. The LP runs only when neither decides.
//
// Holds mutable warm-start state; use one solver per thread.
class GaugeSolver {
 public:
  explicit GaugeSolver(std::shared_ptr<const RowMatrix> f);

  // +infinity when a is not in the column span of F.
  absl::StatusOr<double> Norm(const Eigen::VectorXd& a);

  // Whether ||a||_K <= r.
  absl::StatusOr<bool> Within(const Eigen::VectorXd& a, double r);

  // A minimizer x of ||x||_1 subject to Fx = a, for the `a` of the most
  // recent Norm() call with a finite result.
  Eigen::VectorXd Preimage() const;

  // Optimal dual point of the most recent solve; a supporting functional of
  // K at a / ||a||_K.
  const Eigen::VectorXd& dual() const { return y_; }

  struct Stats {
    std::int64_t solves = 0;
    std::int64_t pivots = 0;
    std::int64_t fast_accepts = 0;
    std::int64_t fast_rejects = 0;
  };
  const Stats& stats() const { return stats_; }

 private:
  absl::Status Solve(const Eigen::VectorXd& a, bool bland);
  void ResetToOrigin();
  void RememberDual();

  std::shared_ptr<const RowMatrix> f_;
  int d_;
  int n_;
  Eigen::VectorXd column_norms_;
  Eigen::VectorXd bounds_;

  Eigen::VectorXd y_;
  Eigen::VectorXd fty_;
  std::vector<int> active_cols_;
  std::vector<double> active_signs_;
  std::vector<char> is_active_;
  Eigen::VectorXd lambda_;
  double norm_ = 0.0;
  bool norm_valid_ = false;

  // Inverse of the basis matrix when the active set is a full vertex.
  Eigen::MatrixXd basis_inverse_;
  bool basis_inverse_valid_ = false;

  std::vector<Eigen::VectorXd> polar_cache_;
  std::size_t polar_cache_next_ = 0;

  std::int64_t solves_since_refresh_ = 0;
  Stats stats_;
};

}  // namespace knorm

#endif  // KNORM_GAUGE_H_
