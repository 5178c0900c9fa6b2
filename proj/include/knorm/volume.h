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

#ifndef KNORM_VOLUME_H_
#define KNORM_VOLUME_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "knorm/polytope.h"
#include "knorm/random.h"

namespace knorm {

inline constexpr int kDefaultVolumeDimCap = 10;

// vol(K)^{1/d} with a 95% interval.
struct VolumeEstimate {
  int d = 0;
  double radius = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double volume = 0.0;
  double box_volume = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  // No proposal landed in the body; radius and interval are 0.
  bool degenerate = false;
};

// Hit rate of uniform proposals from the tightest enclosing box; for bounded
// queries that box lies inside [-1, 1]^d. The interval comes from the delta
// method applied to the binomial rate.
absl::StatusOr<VolumeEstimate> EstimateVolumeRadius(
    const PolytopeHandle& handle, RngStream& rng, std::int64_t trials,
    int max_dim = kDefaultVolumeDimCap);

}  // namespace knorm

#endif  // KNORM_VOLUME_H_
