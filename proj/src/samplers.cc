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

#include "knorm/samplers.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {
namespace {

constexpr std::int64_t kPilotDraws = 20000;
constexpr double kPilotRate = 0.01;

Eigen::VectorXd UniformInBox(const Eigen::VectorXd& half_widths,
                             RngStream& rng) {
  Eigen::VectorXd p(half_widths.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p(i) = (2.0 * rng.Uniform() - 1.0) * half_widths(i);
  }
  return p;
}

}  // namespace

absl::StatusOr<SamplerChoice> ParseSamplerChoice(std::string_view name) {
  if (name == "rejection") return SamplerChoice::kRejection;
  if (name == "grid-walk" || name == "gridwalk" || name == "grid_walk") {
    return SamplerChoice::kGridWalk;
  }
  if (name == "auto") return SamplerChoice::kAuto;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sampler '", std::string(name),
      "'; expected rejection, grid-walk or auto"));
}

const char* SamplerChoiceName(SamplerChoice choice) {
  switch (choice) {
    case SamplerChoice::kRejection:
      return "rejection";
    case SamplerChoice::kGridWalk:
      return "grid-walk";
    case SamplerChoice::kAuto:
      return "auto";
  }
  return "unknown";
}

absl::StatusOr<std::vector<Eigen::VectorXd>> PointSampler::DrawMany(
    std::int64_t count, RngStream& rng) {
  if (count < 0) {
    return absl::InvalidArgumentError("sample count must be nonnegative");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    absl::StatusOr<Eigen::VectorXd> p = Draw(rng);
    if (!p.ok()) return p.status();
    out.push_back(*std::move(p));
  }
  return out;
}

RejectionSampler::RejectionSampler(const PolytopeHandle& handle)
    : handle_(handle), oracle_(handle) {}

absl::StatusOr<Eigen::VectorXd> RejectionSampler::Draw(RngStream& rng) {
  for (std::int64_t i = 0; i < kMaxAttempts; ++i) {
    Eigen::VectorXd p = UniformInBox(handle_.half_widths(), rng);
    ++attempts_;
    absl::StatusOr<bool> inside = oracle_.Contains(p);
    if (!inside.ok()) return inside.status();
    if (*inside) {
      ++accepted_;
      return p;
    }
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "rejection sampler made ", kMaxAttempts,
      " proposals without a hit; acceptance rate is below the 1e-6 guard"));
}

ResolvedWalkConfig ResolveWalkConfig(const GridWalkConfig& cfg, int d) {
  ResolvedWalkConfig r;
  r.beta = cfg.beta > 0.0 ? cfg.beta : 1.0 / (static_cast<double>(d) * d);
  r.steps = cfg.steps >= 0
                ? cfg.steps
                : static_cast<std::int64_t>(
                      std::ceil(50.0 * d * d / (r.beta * r.beta)));
  r.burn_in = cfg.burn_in >= 0 ? cfg.burn_in : r.steps / 2;
  r.thin = cfg.thin > 0 ? cfg.thin : 10 * static_cast<std::int64_t>(d);
  return r;
}

GridWalkSampler::GridWalkSampler(const PolytopeHandle& handle,
                                 GridWalkConfig cfg)
    : handle_(handle),
      oracle_(handle),
      cfg_(cfg),
      resolved_(ResolveWalkConfig(cfg, handle.d())) {
  const Eigen::VectorXd& h = handle_.half_widths();
  if (cfg_.round_to_box && h.maxCoeff() > 0.0) {
    axis_scale_ = h / h.maxCoeff();
  } else {
    axis_scale_ = Eigen::VectorXd::Ones(handle_.d());
  }
  if (cfg_.trace != nullptr) {
    *cfg_.trace << "step";
    for (int i = 0; i < handle_.d(); ++i) *cfg_.trace << ",x" << i + 1;
    *cfg_.trace << ",accepted\n";
  }
}

absl::StatusOr<std::int64_t> GridWalkSampler::Advance(
    Eigen::VectorXd& point, double beta, std::int64_t steps,
    std::int64_t step_offset, RngStream& rng) {
  const int d = handle_.d();
  std::int64_t moves = 0;
  for (std::int64_t t = 0; t < steps; ++t) {
    // One 64-bit draw decides laziness, direction and coordinate.
    const std::uint64_t bits = rng();
    bool accepted = false;
    if (bits & 1) {
      const double sign = (bits & 2) ? 1.0 : -1.0;
      const int i = static_cast<int>(
          (static_cast<unsigned __int128>(bits >> 2) * d) >> 62);
      const double old = point(i);
      point(i) = old + sign * beta * axis_scale_(i);
      absl::StatusOr<bool> inside = oracle_.Contains(point);
      if (!inside.ok()) return inside.status();
      if (*inside) {
        accepted = true;
        ++moves;
      } else {
        point(i) = old;
      }
    }
    if (cfg_.trace != nullptr) {
      *cfg_.trace << step_offset + t;
      for (int i = 0; i < d; ++i) *cfg_.trace << ',' << point(i);
      *cfg_.trace << ',' << (accepted ? 1 : 0) << '\n';
    }
  }
  return moves;
}

Eigen::VectorXd GridWalkSampler::Smooth(const Eigen::VectorXd& point,
                                        double beta, RngStream& rng) const {
  Eigen::VectorXd out = point;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) += (rng.Uniform() - 0.5) * beta * axis_scale_(i);
  }
  return out;
}

absl::StatusOr<WalkResult> GridWalkSampler::Walk(RngStream& rng) {
  return Walk(rng, resolved_.beta, resolved_.steps);
}

absl::StatusOr<WalkResult> GridWalkSampler::Walk(RngStream& rng, double beta,
                                                 std::int64_t steps) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid spacing must be positive, got ", beta));
  }
  if (steps < 0) return absl::InvalidArgumentError("negative step budget");
  Eigen::VectorXd point = Eigen::VectorXd::Zero(handle_.d());
  absl::StatusOr<bool> origin = oracle_.Contains(point);
  if (!origin.ok()) return origin.status();
  if (!*origin) {
    return absl::FailedPreconditionError("walk start is outside the body");
  }
  absl::StatusOr<std::int64_t> moves = Advance(point, beta, steps, 0, rng);
  if (!moves.ok()) return moves.status();
  WalkResult result;
  result.point = Smooth(point, beta, rng);
  result.steps = steps;
  result.moves = *moves;
  const double side = std::ceil(2.0 / beta);
  result.mixed = static_cast<double>(steps) >= handle_.d() * side * side;
  return result;
}

absl::StatusOr<Eigen::VectorXd> GridWalkSampler::Draw(RngStream& rng) {
  absl::StatusOr<WalkResult> walk = Walk(rng);
  if (!walk.ok()) return walk.status();
  return std::move(walk->point);
}

absl::StatusOr<std::vector<Eigen::VectorXd>> GridWalkSampler::DrawMany(
    std::int64_t count, RngStream& rng) {
  if (count < 0) {
    return absl::InvalidArgumentError("sample count must be nonnegative");
  }
  const double beta = resolved_.beta;
  Eigen::VectorXd point = Eigen::VectorXd::Zero(handle_.d());
  std::int64_t clock = 0;
  absl::StatusOr<std::int64_t> moved =
      Advance(point, beta, resolved_.burn_in, clock, rng);
  if (!moved.ok()) return moved.status();
  clock += resolved_.burn_in;
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::int64_t s = 0; s < count; ++s) {
    moved = Advance(point, beta, resolved_.thin, clock, rng);
    if (!moved.ok()) return moved.status();
    clock += resolved_.thin;
    out.push_back(Smooth(point, beta, rng));
  }
  return out;
}

absl::StatusOr<std::unique_ptr<PointSampler>> MakeSampler(
    const PolytopeHandle& handle, SamplerChoice choice,
    const GridWalkConfig& walk, RngStream& rng) {
  if (choice == SamplerChoice::kAuto) {
    MembershipOracle oracle(handle);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < kPilotDraws; ++i) {
      absl::StatusOr<bool> inside =
          oracle.Contains(UniformInBox(handle.half_widths(), rng));
      if (!inside.ok()) return inside.status();
      hits += *inside;
    }
    choice = hits >= kPilotRate * kPilotDraws ? SamplerChoice::kRejection
                                              : SamplerChoice::kGridWalk;
  }
  if (choice == SamplerChoice::kRejection) {
    return std::unique_ptr<PointSampler>(
        std::make_unique<RejectionSampler>(handle));
  }
  return std::unique_ptr<PointSampler>(
      std::make_unique<GridWalkSampler>(handle, walk));
}

}  // namespace knorm
