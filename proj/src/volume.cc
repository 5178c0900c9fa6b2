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

#include "knorm/volume.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {

absl::StatusOr<VolumeEstimate> EstimateVolumeRadius(
    const PolytopeHandle& handle, RngStream& rng, std::int64_t trials,
    int max_dim) {
  const int d = handle.d();
  if (d > max_dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "volume estimation is capped at d=", max_dim, ", got d=", d));
  }
  if (trials < 1) {
    return absl::InvalidArgumentError("need at least one trial");
  }
  const Eigen::VectorXd& h = handle.half_widths();
  MembershipOracle oracle(handle);
  Eigen::VectorXd p(d);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < d; ++i) p(i) = (2.0 * rng.Uniform() - 1.0) * h(i);
    absl::StatusOr<bool> inside = oracle.Contains(p);
    if (!inside.ok()) return inside.status();
    hits += *inside;
  }

  VolumeEstimate out;
  out.d = d;
  out.hits = hits;
  out.trials = trials;
  out.box_volume = (2.0 * h.array()).prod();
  // A zero-width box means K is flat: its d-volume is zero.
  if (hits == 0 || out.box_volume == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double rate = static_cast<double>(hits) / trials;
  out.volume = rate * out.box_volume;
  out.radius = std::pow(out.volume, 1.0 / d);
  // d(rate^{1/d}) / rate^{1/d} = (1/d) d(rate) / rate.
  const double rel_se = std::sqrt((1.0 - rate) / (rate * trials)) / d;
  out.ci_low = std::max(0.0, out.radius * (1.0 - 1.96 * rel_se));
  out.ci_high = out.radius * (1.0 + 1.96 * rel_se);
  return out;
}

}  // namespace knorm
