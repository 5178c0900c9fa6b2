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

#ifndef KNORM_SAMPLERS_H_
#define KNORM_SAMPLERS_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "knorm/polytope.h"
#include "knorm/random.h"

namespace knorm {

enum class SamplerChoice { kRejection, kGridWalk, kAuto };

absl::StatusOr<SamplerChoice> ParseSamplerChoice(std::string_view name);
const char* SamplerChoiceName(SamplerChoice choice);

// Draws points approximately uniform on a body.
class PointSampler {
 public:
  virtual ~PointSampler() = default;

  virtual absl::StatusOr<Eigen::VectorXd> Draw(RngStream& rng) = 0;

  // `count` draws. The default calls Draw() repeatedly; the grid walk
  // overrides it with a single thinned chain.
  virtual absl::StatusOr<std::vector<Eigen::VectorXd>> DrawMany(
      std::int64_t count, RngStream& rng);

  virtual std::string name() const = 0;
};

// Rejection from the tightest enclosing box. Exact up to the membership
// oracle. Draw() fails with FailedPrecondition when a single draw needs more
// than kMaxAttempts proposals, i.e. the acceptance rate is below ~1e-6.
class RejectionSampler : public PointSampler {
 public:
  static constexpr std::int64_t kMaxAttempts = 2'000'000;

  explicit RejectionSampler(const PolytopeHandle& handle);

  absl::StatusOr<Eigen::VectorXd> Draw(RngStream& rng) override;
  std::string name() const override { return "rejection"; }

  std::int64_t attempts() const { return attempts_; }
  std::int64_t accepted() const { return accepted_; }

 private:
  PolytopeHandle handle_;
  MembershipOracle oracle_;
  std::int64_t attempts_ = 0;
  std::int64_t accepted_ = 0;
};

// Grid walk parameters. Zero or negative fields take the defaults below,
// which depend on d.
struct GridWalkConfig {
  // Lattice spacing; default 1/d^2.
  double beta = 0.0;
  // Steps of one independent walk; default ceil(50 d^2 / beta^2).
  std::int64_t steps = -1;
  // Chain mode (DrawMany): steps before the first sample; default steps/2.
  std::int64_t burn_in = -1;
  // Chain mode: steps between samples; default 10 d.
  std::int64_t thin = 0;
  // Stretch the lattice per axis by h_i / max h so thin bodies still have
  // many grid points across every direction.
  bool round_to_box = true;
  // When set, every step is written as CSV: step,x_1..x_d,accepted.
  std::ostream* trace = nullptr;
};

struct ResolvedWalkConfig {
  double beta;
  std::int64_t steps;
  std::int64_t burn_in;
  std::int64_t thin;
};

ResolvedWalkConfig ResolveWalkConfig(const GridWalkConfig& cfg, int d);

struct WalkResult {
  Eigen::VectorXd point;
  std::int64_t steps = 0;
  std::int64_t moves = 0;
  // Heuristic: at least d * ceil(2 / beta)^2 steps were taken.
  bool mixed = false;
};

// Lazy Metropolis walk on the lattice beta * D * Z^d inside the body. Each
// step holds with probability 1/2, otherwise proposes +-1 in a uniform
// coordinate and moves iff the proposal is inside. Starts at the origin.
// The output is the final lattice point plus a uniform offset within its
// cell, so it is near-uniform on the union of cells around lattice points
// of the body.
class GridWalkSampler : public PointSampler {
 public:
  GridWalkSampler(const PolytopeHandle& handle, GridWalkConfig cfg = {});

  absl::StatusOr<WalkResult> Walk(RngStream& rng);
  // Same walk with a different spacing and step count.
  absl::StatusOr<WalkResult> Walk(RngStream& rng, double beta,
                                  std::int64_t steps);

  absl::StatusOr<Eigen::VectorXd> Draw(RngStream& rng) override;
  absl::StatusOr<std::vector<Eigen::VectorXd>> DrawMany(
      std::int64_t count, RngStream& rng) override;
  std::string name() const override { return "grid-walk"; }

  const ResolvedWalkConfig& config() const { return resolved_; }
  const GaugeSolver::Stats& oracle_stats() const {
    return oracle_.gauge().stats();
  }

 private:
  // Advances `point` by `steps` lazy steps; returns the number of moves.
  absl::StatusOr<std::int64_t> Advance(Eigen::VectorXd& point, double beta,
                                       std::int64_t steps,
                                       std::int64_t step_offset,
                                       RngStream& rng);
  Eigen::VectorXd Smooth(const Eigen::VectorXd& point, double beta,
                         RngStream& rng) const;

  PolytopeHandle handle_;
  MembershipOracle oracle_;
  GridWalkConfig cfg_;
  ResolvedWalkConfig resolved_;
  Eigen::VectorXd axis_scale_;
};

// Rejection, grid walk, or (kAuto) rejection when a 20000-point pilot sees
// an acceptance rate of at least 1%, grid walk otherwise.
absl::StatusOr<std::unique_ptr<PointSampler>> MakeSampler(
    const PolytopeHandle& handle, SamplerChoice choice,
    const GridWalkConfig& walk, RngStream& rng);

}  // namespace knorm

#endif  // KNORM_SAMPLERS_H_
