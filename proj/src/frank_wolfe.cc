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

#include "knorm/frank_wolfe.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {
namespace {

// Atom 2j is +r f_j, atom 2j+1 is -r f_j.
class AwayStepSolver {
 public:
  AwayStepSolver(const RowMatrix& f, const Eigen::VectorXd& a, double r)
      : f_(f), a_(a), r_(r), weights_(2 * f.cols(), 0.0) {
    weights_[0] = 0.5;
    weights_[1] = 0.5;
    active_ = {0, 1};
    z_ = Eigen::VectorXd::Zero(f.rows());
  }

  // Runs until `done(lower, upper)` or the cap. Returns false at the cap.
  bool Run(std::int64_t max_iterations,
           const std::function<bool(double, double)>& done,
           DistanceResult& out) {
    Eigen::VectorXd residual(a_.size());
    Eigen::VectorXd scores(f_.cols());
    for (std::int64_t it = 0;; ++it) {
      residual = a_ - z_;
      const double upper = residual.norm();
      double lower = 0.0;
      Eigen::Index best = 0;
      if (upper > 0.0) {
        scores.noalias() = f_.transpose() * residual;
        const double support = r_ * scores.cwiseAbs().maxCoeff(&best);
        lower = std::max(0.0, (residual.dot(a_) - support) / upper);
      }
      out.lower = lower;
      out.upper = upper;
      out.value = upper;
      out.iterations = it;
      if (upper == 0.0 || done(lower, upper)) return true;
      if (it >= max_iterations) return false;

      // Toward atom: maximizes <residual, v>.
      const int toward = 2 * static_cast<int>(best) + (scores(best) < 0.0);
      Eigen::VectorXd toward_dir = Atom(toward) - z_;

      // Away atom: the active atom minimizing <residual, v>.
      int away = -1;
      double away_score = 0.0;
      for (int atom : active_) {
        const double s = residual.dot(Atom(atom));
        if (away < 0 || s < away_score) {
          away = atom;
          away_score = s;
        }
      }
      Eigen::VectorXd away_dir = z_ - Atom(away);

      const double toward_gain = residual.dot(toward_dir);
      const double away_gain = residual.dot(away_dir);
      const bool use_toward = toward_gain >= away_gain;
      const Eigen::VectorXd& dir = use_toward ? toward_dir : away_dir;
      const double gain = use_toward ? toward_gain : away_gain;
      const double dir_sq = dir.squaredNorm();
      if (gain <= 0.0 || dir_sq == 0.0) return true;

      double max_step = 1.0;
      if (!use_toward) {
        const double w = weights_[away];
        max_step = w / (1.0 - w);
      }
      const double step = std::min(max_step, gain / dir_sq);
      z_.noalias() += step * dir;

      if (use_toward) {
        for (int atom : active_) weights_[atom] *= (1.0 - step);
        if (step >= 1.0) {
          for (int atom : active_) weights_[atom] = 0.0;
          active_.clear();
        }
        if (weights_[toward] == 0.0) active_.push_back(toward);
        weights_[toward] += step;
      } else {
        for (int atom : active_) weights_[atom] *= (1.0 + step);
        weights_[away] -= step;
        if (step >= max_step || weights_[away] <= 0.0) weights_[away] = 0.0;
      }
      active_.erase(std::remove_if(active_.begin(), active_.end(),
                                   [&](int atom) {
                                     return weights_[atom] <= 0.0;
                                   }),
                    active_.end());
      if (active_.empty()) {
        // Only reachable by a full step onto the toward atom.
        active_.push_back(toward);
        weights_[toward] = 1.0;
      }
      if ((it & 1023) == 1023) Resync();
    }
  }

 private:
  Eigen::VectorXd Atom(int atom) const {
    const double sign = (atom & 1) ? -r_ : r_;
    return sign * f_.col(atom / 2);
  }

  // Recomputes z from the weights to stop rounding drift.
  void Resync() {
    double total = 0.0;
    for (int atom : active_) total += weights_[atom];
    z_.setZero();
    for (int atom : active_) {
      weights_[atom] /= total;
      z_.noalias() += weights_[atom] * Atom(atom);
    }
  }

  const RowMatrix& f_;
  const Eigen::VectorXd& a_;
  double r_;
  std::vector<double> weights_;
  std::vector<int> active_;
  Eigen::VectorXd z_;
};

absl::Status CheckArgs(const RowMatrix& f, const Eigen::VectorXd& a, double r,
                       double eta) {
  if (a.size() != f.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "point has dimension ", a.size(), ", matrix has ", f.rows(), " rows"));
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    return absl::InvalidArgumentError(
        absl::StrCat("radius must be positive, got ", r));
  }
  if (!(eta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tolerance must be positive, got ", eta));
  }
  return absl::OkStatus();
}

}  // namespace

std::int64_t DefaultIterationCap(int d, int n, double eta) {
  const double cap = 10.0 * d * n / (eta * eta);
  return static_cast<std::int64_t>(std::clamp(cap, 1e4, 1e7));
}

absl::StatusOr<DistanceResult> L1DistanceToImage(const RowMatrix& f,
                                                 const Eigen::VectorXd& a,
                                                 double r, double eta,
                                                 std::int64_t max_iterations) {
  if (absl::Status s = CheckArgs(f, a, r, eta); !s.ok()) return s;
  if (max_iterations <= 0) {
    max_iterations = DefaultIterationCap(f.rows(), f.cols(), eta);
  }
  AwayStepSolver solver(f, a, r);
  DistanceResult result;
  const bool converged = solver.Run(
      max_iterations,
      [&](double lower, double upper) {
        return upper <= eta || upper - lower <= eta;
      },
      result);
  if (!converged) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "Frank-Wolfe stopped after ", max_iterations,
        " iterations; bracket [", result.lower, ", ", result.upper, "]"));
  }
  return result;
}

absl::StatusOr<ThresholdSide> DistanceThresholdTest(
    const RowMatrix& f, const Eigen::VectorXd& a, double r, double threshold,
    double eta, std::int64_t max_iterations) {
  if (absl::Status s = CheckArgs(f, a, r, eta); !s.ok()) return s;
  if (max_iterations <= 0) {
    max_iterations = DefaultIterationCap(f.rows(), f.cols(), eta);
  }
  AwayStepSolver solver(f, a, r);
  DistanceResult result;
  solver.Run(
      max_iterations,
      [&](double lower, double upper) {
        return upper <= threshold || lower > threshold || upper - lower <= eta;
      },
      result);
  if (result.upper <= threshold) return ThresholdSide::kBelow;
  if (result.lower > threshold) return ThresholdSide::kAbove;
  // The bracket straddles the threshold: either it is narrower than eta or
  // the cap ran out.
  return ThresholdSide::kBand;
}

}  // namespace knorm
