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

#include "knorm/gauge.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"

namespace knorm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kRefreshInterval = 64;
// Relative size of the right-hand-side perturbation; see the constructor.
constexpr double kPerturbation = 1e-7;

double HashUnit(std::uint64_t j) {
  std::uint64_t x = j + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

GaugeSolver::GaugeSolver(std::shared_ptr<const RowMatrix> f)
    : f_(std::move(f)),
      d_(static_cast<int>(f_->rows())),
      n_(static_cast<int>(f_->cols())) {
  column_norms_ = f_->colwise().norm().transpose();
  // Polar constraints |<f_j, y>| <= 1 are massively degenerate for structured
  // F (for a +-1 first row, y = e_1 makes every constraint tight). Fixed
  // distinct bounds 1 + O(1e-7) break the ties. The reported norm is the
  // l1 mass of an exactly feasible preimage, so it never undershoots, and
  // it overshoots by a relative 1e-7 at most.
  bounds_.resize(n_);
  for (int j = 0; j < n_; ++j) bounds_(j) = 1.0 + kPerturbation * HashUnit(j);
  ResetToOrigin();
}

void GaugeSolver::ResetToOrigin() {
  y_ = Eigen::VectorXd::Zero(d_);
  fty_ = Eigen::VectorXd::Zero(n_);
  active_cols_.clear();
  active_signs_.clear();
  is_active_.assign(n_, 0);
  lambda_.resize(0);
  basis_inverse_valid_ = false;
  norm_valid_ = false;
}

void GaugeSolver::RememberDual() {
  const std::size_t capacity = 2 * static_cast<std::size_t>(d_) + 2;
  for (const Eigen::VectorXd& cached : polar_cache_) {
    if ((cached - y_).lpNorm<Eigen::Infinity>() < 1e-12) return;
  }
  if (polar_cache_.size() < capacity) {
    polar_cache_.push_back(y_);
  } else {
    polar_cache_[polar_cache_next_] = y_;
    polar_cache_next_ = (polar_cache_next_ + 1) % capacity;
  }
}

absl::Status GaugeSolver::Solve(const Eigen::VectorXd& a, bool bland) {
  ++stats_.solves;
  norm_valid_ = false;
  basis_inverse_valid_ = false;
  const double a_norm = a.norm();
  if (a_norm == 0.0) {
    norm_ = 0.0;
    lambda_ = Eigen::VectorXd::Zero(active_cols_.size());
    norm_valid_ = true;
    return absl::OkStatus();
  }
  if (++solves_since_refresh_ >= kRefreshInterval) {
    fty_.noalias() = f_->transpose() * y_;
    solves_since_refresh_ = 0;
  }

  const double residual_tol = 1e-10 * std::max(1.0, a_norm);
  const int max_iterations = bland ? 2000 * (d_ + 1) : 40 * (d_ + 5);
  int degenerate_run = 0;
  Eigen::MatrixXd basis;
  Eigen::VectorXd lambda;
  Eigen::VectorXd direction;
  Eigen::VectorXd rates(n_);

  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    const int m = static_cast<int>(active_cols_.size());
    basis.resize(d_, m);
    for (int k = 0; k < m; ++k) {
      basis.col(k) = active_signs_[k] * f_->col(active_cols_[k]);
    }
    if (m == 0) {
      lambda.resize(0);
      direction = a;
    } else {
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr = basis.householderQr();
      lambda = qr.solve(a);
      direction = a - basis * lambda;
      // One refinement pass keeps the direction orthogonal to the active
      // columns to working precision, so columns in their span get a zero
      // rate instead of rounding noise.
      const Eigen::VectorXd fix = qr.solve(direction);
      lambda += fix;
      direction -= basis * fix;
    }

    const double direction_norm = direction.norm();
    if (direction_norm > residual_tol && m < d_) {
      // Ascend along the projected objective until a new constraint binds.
      rates.noalias() = f_->transpose() * direction;
      double best_step = kInf;
      int best_col = -1;
      double best_sign = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (is_active_[j]) continue;
        const double rate = rates(j);
        if (std::abs(rate) <= 1e-12 * direction_norm * column_norms_(j)) {
          continue;
        }
        const double sign = rate > 0.0 ? 1.0 : -1.0;
        const double slack = std::max(0.0, bounds_(j) - sign * fty_(j));
        const double step = slack / std::abs(rate);
        const bool better =
            best_col < 0 ||
            (bland ? step < best_step - 1e-14 * (1.0 + best_step)
                   : step < best_step);
        if (better) {
          best_step = step;
          best_col = j;
          best_sign = sign;
        }
      }
      if (best_col < 0) {
        norm_ = kInf;
        norm_valid_ = true;
        return absl::OkStatus();
      }
      degenerate_run = best_step <= 1e-14 ? degenerate_run + 1 : 0;
      if (!bland && degenerate_run > 4 * d_ + 20) {
        return absl::ResourceExhaustedError("degenerate cycling");
      }
      y_.noalias() += best_step * direction;
      fty_.noalias() += best_step * rates;
      active_cols_.push_back(best_col);
      active_signs_.push_back(best_sign);
      is_active_[best_col] = 1;
      ++stats_.pivots;
      continue;
    }

    // Stationary on the current face: check the multipliers.
    int leave = -1;
    const double lambda_tol =
        -1e-11 * std::max(1.0, m > 0 ? lambda.lpNorm<Eigen::Infinity>() : 0.0);
    for (int k = 0; k < m; ++k) {
      if (lambda(k) >= lambda_tol) continue;
      if (leave < 0) {
        leave = k;
      } else if (bland ? active_cols_[k] < active_cols_[leave]
                       : lambda(k) < lambda(leave)) {
        leave = k;
      }
    }
    if (leave < 0) {
      lambda_ = lambda.cwiseMax(0.0);
      norm_ = lambda_.sum();
      norm_valid_ = true;
      if (m == d_) {
        basis_inverse_ = basis.partialPivLu().inverse();
        basis_inverse_valid_ = basis_inverse_.allFinite();
        RememberDual();
      }
      return absl::OkStatus();
    }
    is_active_[active_cols_[leave]] = 0;
    active_cols_.erase(active_cols_.begin() + leave);
    active_signs_.erase(active_signs_.begin() + leave);
    ++stats_.pivots;
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "gauge LP did not converge in ", max_iterations, " iterations"));
}

absl::StatusOr<double> GaugeSolver::Norm(const Eigen::VectorXd& a) {
  if (a.size() != d_) {
    return absl::InvalidArgumentError(
        absl::StrCat("point has dimension ", a.size(), ", body has ", d_));
  }
  absl::Status status = Solve(a, /*bland=*/false);
  if (!status.ok()) {
    // Restart from the origin under Bland's rule, which cannot cycle.
    ResetToOrigin();
    status = Solve(a, /*bland=*/true);
    if (!status.ok()) {
      ResetToOrigin();
      return absl::InternalError(
          absl::StrCat("gauge LP failed: ", status.message()));
    }
  }
  return norm_;
}

absl::StatusOr<bool> GaugeSolver::Within(const Eigen::VectorXd& a, double r) {
  if (a.size() != d_) {
    return absl::InvalidArgumentError(
        absl::StrCat("point has dimension ", a.size(), ", body has ", d_));
  }
  if (basis_inverse_valid_) {
    const double upper = (basis_inverse_ * a).lpNorm<1>();
    if (upper <= r) {
      ++stats_.fast_accepts;
      return true;
    }
    if (y_.dot(a) > r) {
      ++stats_.fast_rejects;
      return false;
    }
  }
  for (const Eigen::VectorXd& polar : polar_cache_) {
    if (polar.dot(a) > r) {
      ++stats_.fast_rejects;
      return false;
    }
  }
  absl::StatusOr<double> norm = Norm(a);
  if (!norm.ok()) return norm.status();
  return *norm <= r;
}

Eigen::VectorXd GaugeSolver::Preimage() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
  if (!norm_valid_ || !std::isfinite(norm_)) return x;
  for (std::size_t k = 0; k < active_cols_.size() &&
                          static_cast<Eigen::Index>(k) < lambda_.size();
       ++k) {
    x(active_cols_[k]) += active_signs_[k] * lambda_(k);
  }
  return x;
}

}  // namespace knorm
