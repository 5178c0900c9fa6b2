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

#include "knorm/lp.h"

#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {
namespace {

using Tableau =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;

class Simplex {
 public:
  // Rows 0..m-1 are constraints, row m is the objective (reduced costs, with
  // the negated objective value in the last column).
  Simplex(Tableau t, std::vector<int> basis)
      : t_(std::move(t)), basis_(std::move(basis)) {}

  // Minimizes over columns [0, allowed); false when unbounded.
  bool Run(int allowed, std::int64_t& pivots) {
    const int m = static_cast<int>(t_.rows()) - 1;
    const int rhs = static_cast<int>(t_.cols()) - 1;
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (t_(m, j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(i, rhs) / a;
        if (ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && leave >= 0 &&
             basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
      ++pivots;
    }
  }

  void Pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double factor = t_(i, col);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(row);
    }
    basis_[row] = col;
  }

  Tableau& tableau() { return t_; }
  std::vector<int>& basis() { return basis_; }

 private:
  Tableau t_;
  std::vector<int> basis_;
};

}  // namespace

absl::StatusOr<LpSolution> SolveLp(const LpProblem& p) {
  const int n = static_cast<int>(p.c.size());
  const int m_ub = static_cast<int>(p.a_ub.rows());
  const int m_eq = static_cast<int>(p.a_eq.rows());
  if ((m_ub > 0 && p.a_ub.cols() != n) || (m_eq > 0 && p.a_eq.cols() != n) ||
      p.b_ub.size() != m_ub || p.b_eq.size() != m_eq) {
    return absl::InvalidArgumentError("LP dimensions are inconsistent");
  }
  const int m = m_ub + m_eq;
  // Columns: x (n), slacks (m_ub), artificials (m), rhs.
  const int slack0 = n;
  const int art0 = n + m_ub;
  const int rhs = art0 + m;
  Tableau t = Tableau::Zero(m + 1, rhs + 1);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const bool ub = i < m_ub;
    const double b = ub ? p.b_ub(i) : p.b_eq(i - m_ub);
    const double sign = b < 0.0 ? -1.0 : 1.0;
    if (ub) {
      t.row(i).head(n) = sign * p.a_ub.row(i);
      t(i, slack0 + i) = sign;
    } else {
      t.row(i).head(n) = sign * p.a_eq.row(i - m_ub);
    }
    t(i, rhs) = sign * b;
    t(i, art0 + i) = 1.0;
    basis[i] = art0 + i;
  }
  // Phase one: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (int i = 0; i < m; ++i) t(m, art0 + i) = 0.0;

  Simplex simplex(std::move(t), std::move(basis));
  LpSolution out;
  simplex.Run(art0, out.pivots);
  Tableau& tab = simplex.tableau();
  const double scale = 1.0 + p.b_ub.cwiseAbs().sum() + p.b_eq.cwiseAbs().sum();
  if (-tab(m, rhs) > 1e-8 * scale) {
    return absl::FailedPreconditionError("LP is infeasible");
  }
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (simplex.basis()[i] < art0) continue;
    for (int j = 0; j < art0; ++j) {
      if (std::abs(tab(i, j)) > kPivotTol) {
        simplex.Pivot(i, j);
        ++out.pivots;
        break;
      }
    }
  }
  // Phase two. Artificial columns never re-enter; a redundant row keeps its
  // artificial basic at level zero, which is harmless.
  tab.row(m).setZero();
  tab.block(m, 0, 1, n) = p.c.transpose();
  for (int i = 0; i < m; ++i) {
    const int b = simplex.basis()[i];
    if (b < n && p.c(b) != 0.0) tab.row(m) -= p.c(b) * tab.row(i);
  }
  if (!simplex.Run(art0, out.pivots)) {
    return absl::OutOfRangeError("LP is unbounded");
  }
  out.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = simplex.basis()[i];
    if (b < n) out.x(b) = tab(i, rhs);
  }
  out.objective = p.c.dot(out.x);
  return out;
}

}  // namespace knorm
