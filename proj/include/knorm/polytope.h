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

#ifndef KNORM_POLYTOPE_H_
#define KNORM_POLYTOPE_H_

#include <memory>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "knorm/gauge.h"
#include "knorm/query_model.h"

namespace knorm {

struct PolytopeOptions {
  // Work with K' = K + B_2^d instead of K.
  bool inflate = false;
  // Euclidean width of the ambiguity band of the inflated-body oracle.
  double eta = 1e-3;
};

// K = F B_1^n (or K' = K + B_2^d) with cached geometry. Immutable; copies
// share the matrix.
class PolytopeHandle {
 public:
  static absl::StatusOr<PolytopeHandle> Create(const QueryMatrix& f,
                                               PolytopeOptions options = {});

  int d() const { return query_.d(); }
  int n() const { return query_.n(); }
  const QueryMatrix& query() const { return query_; }
  std::shared_ptr<const RowMatrix> matrix() const { return matrix_; }
  bool inflate() const { return options_.inflate; }
  double eta() const { return options_.eta; }

  // Half-widths of the tightest axis-aligned box around the body:
  // max_j |F_ij|, plus 1 when inflated.
  const Eigen::VectorXd& half_widths() const { return half_widths_; }
  // Radius of a Euclidean ball containing the body: max_j ||f_j||_2, plus 1
  // when inflated. At most sqrt(d) for bounded queries.
  double outer_radius() const { return outer_radius_; }

 private:
  PolytopeHandle(QueryMatrix query, PolytopeOptions options);

  QueryMatrix query_;
  std::shared_ptr<const RowMatrix> matrix_;
  PolytopeOptions options_;
  Eigen::VectorXd half_widths_;
  double outer_radius_ = 0.0;
};

enum class Membership { kInside, kOutside, kBoundaryBand };

const char* MembershipName(Membership m);

// Stateful membership and norm oracle for one handle. The plain body uses
// the exact gauge LP, so it never reports a band. The inflated body uses
// Frank-Wolfe on dist(a, rK) <= r with tolerance eta.
//
// Not thread-safe; make one per thread.
class MembershipOracle {
 public:
  explicit MembershipOracle(const PolytopeHandle& handle);

  // Whether a lies in r times the body.
  absl::StatusOr<Membership> Test(const Eigen::VectorXd& a, double r = 1.0);

  // Test() folded to a boolean; the band counts as inside.
  absl::StatusOr<bool> Contains(const Eigen::VectorXd& a, double r = 1.0);

  // ||a|| of the body. Exact for the plain body (+infinity off the span of
  // F); bisection to relative 1e-4 for the inflated one.
  absl::StatusOr<double> Norm(const Eigen::VectorXd& a);

  const GaugeSolver& gauge() const { return gauge_; }
  GaugeSolver& gauge() { return gauge_; }

 private:
  PolytopeHandle handle_;
  GaugeSolver gauge_;
};

// One-shot conveniences.
absl::StatusOr<Membership> TestMembership(const PolytopeHandle& handle,
                                          const Eigen::VectorXd& a,
                                          double r = 1.0);
absl::StatusOr<double> MinkowskiNorm(const PolytopeHandle& handle,
                                     const Eigen::VectorXd& a);

}  // namespace knorm

#endif  // KNORM_POLYTOPE_H_
