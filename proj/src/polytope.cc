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

#include "knorm/polytope.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "knorm/frank_wolfe.h"

namespace knorm {

PolytopeHandle::PolytopeHandle(QueryMatrix query, PolytopeOptions options)
    : query_(std::move(query)),
      matrix_(std::make_shared<const RowMatrix>(query_.entries())),
      options_(options) {
  const double pad = options_.inflate ? 1.0 : 0.0;
  half_widths_ = matrix_->cwiseAbs().rowwise().maxCoeff().array() + pad;
  outer_radius_ = matrix_->colwise().norm().maxCoeff() + pad;
}

absl::StatusOr<PolytopeHandle> PolytopeHandle::Create(const QueryMatrix& f,
                                                      PolytopeOptions options) {
  if (!(options.eta > 0.0) || !std::isfinite(options.eta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("oracle tolerance must be positive, got ", options.eta));
  }
  return PolytopeHandle(f, options);
}

const char* MembershipName(Membership m) {
  switch (m) {
    case Membership::kInside:
      return "inside";
    case Membership::kOutside:
      return "outside";
    case Membership::kBoundaryBand:
      return "boundary-band";
  }
  return "unknown";
}

MembershipOracle::MembershipOracle(const PolytopeHandle& handle)
    : handle_(handle), gauge_(handle.matrix()) {}

absl::StatusOr<Membership> MembershipOracle::Test(const Eigen::VectorXd& a,
                                                  double r) {
  if (a.size() != handle_.d()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "point has dimension ", a.size(), ", body has ", handle_.d()));
  }
  if (!(r >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("radius must be nonnegative, got ", r));
  }
  if (!handle_.inflate()) {
    absl::StatusOr<bool> within = gauge_.Within(a, r);
    if (!within.ok()) return within.status();
    return *within ? Membership::kInside : Membership::kOutside;
  }
  if (r == 0.0) {
    return a.isZero(0.0) ? Membership::kInside : Membership::kOutside;
  }
  // a in r(K + B) iff dist(a, rK) <= r. Points already in rK skip FW.
  absl::StatusOr<bool> in_core = gauge_.Within(a, r);
  if (!in_core.ok()) return in_core.status();
  if (*in_core) return Membership::kInside;
  if (a.norm() <= r) return Membership::kInside;
  absl::StatusOr<ThresholdSide> side =
      DistanceThresholdTest(*handle_.matrix(), a, r, r, handle_.eta());
  if (!side.ok()) return side.status();
  switch (*side) {
    case ThresholdSide::kBelow:
      return Membership::kInside;
    case ThresholdSide::kAbove:
      return Membership::kOutside;
    case ThresholdSide::kBand:
      return Membership::kBoundaryBand;
  }
  return Membership::kBoundaryBand;
}

absl::StatusOr<bool> MembershipOracle::Contains(const Eigen::VectorXd& a,
                                                double r) {
  absl::StatusOr<Membership> m = Test(a, r);
  if (!m.ok()) return m.status();
  return *m != Membership::kOutside;
}

absl::StatusOr<double> MembershipOracle::Norm(const Eigen::VectorXd& a) {
  if (a.size() != handle_.d()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "point has dimension ", a.size(), ", body has ", handle_.d()));
  }
  if (!handle_.inflate()) return gauge_.Norm(a);

  // B_2 is inside K', so the norm is at most ||a||_2; the plain gauge is
  // another upper bound.
  double hi = a.norm();
  if (hi == 0.0) return 0.0;
  absl::StatusOr<double> core = gauge_.Norm(a);
  if (!core.ok()) return core.status();
  hi = std::min(hi, *core);
  double lo = 0.0;
  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<bool> inside = Contains(a, mid);
    if (!inside.ok()) return inside.status();
    (*inside ? hi : lo) = mid;
  }
  return hi;
}

absl::StatusOr<Membership> TestMembership(const PolytopeHandle& handle,
                                          const Eigen::VectorXd& a, double r) {
  MembershipOracle oracle(handle);
  return oracle.Test(a, r);
}

absl::StatusOr<double> MinkowskiNorm(const PolytopeHandle& handle,
                                     const Eigen::VectorXd& a) {
  MembershipOracle oracle(handle);
  return oracle.Norm(a);
}

}  // namespace knorm
