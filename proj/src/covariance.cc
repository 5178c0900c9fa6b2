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

#include "knorm/covariance.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {

std::int64_t DefaultCovarianceSamples(int d) {
  const std::int64_t d4 = static_cast<std::int64_t>(d) * d * d * d;
  return std::max<std::int64_t>(1000, d4);
}

absl::StatusOr<CovarianceSummary> SummarizeCovariance(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    return absl::InvalidArgumentError("covariance must be square and nonempty");
  }
  if (!m.allFinite()) {
    return absl::InvalidArgumentError("covariance has non-finite entries");
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    return absl::InternalError("symmetric eigensolver failed");
  }
  const Eigen::Index d = sym.rows();
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });
  CovarianceSummary out;
  out.m = sym;
  out.sigma.resize(d);
  out.basis.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.sigma(i) = eig.eigenvalues()(order[i]);
    out.basis.col(i) = eig.eigenvectors().col(order[i]);
  }
  out.mean = Eigen::VectorXd::Zero(d);
  out.mean_se = Eigen::VectorXd::Zero(d);
  return out;
}

absl::StatusOr<CovarianceSummary> EstimateCovariance(
    const PolytopeHandle& handle, std::int64_t sample_count,
    PointSampler& sampler, RngStream& rng) {
  if (sample_count < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 samples, got ", sample_count));
  }
  absl::StatusOr<std::vector<Eigen::VectorXd>> draws =
      sampler.DrawMany(sample_count, rng);
  if (!draws.ok()) return draws.status();
  const int d = handle.d();
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const Eigen::VectorXd& z : *draws) {
    second.selfadjointView<Eigen::Lower>().rankUpdate(z);
    sum += z;
  }
  second = second.selfadjointView<Eigen::Lower>();
  const double count = static_cast<double>(sample_count);
  second /= count;

  absl::StatusOr<CovarianceSummary> out = SummarizeCovariance(second);
  if (!out.ok()) return out.status();
  out->samples = sample_count;
  out->mean = sum / count;
  const Eigen::VectorXd var =
      (second.diagonal() - out->mean.cwiseAbs2()).cwiseMax(0.0);
  out->mean_se = (var / count).cwiseSqrt();
  for (int i = 0; i < d; ++i) {
    if (std::abs(out->mean(i)) > 3.0 * out->mean_se(i) + 1e-15) {
      out->mean_flagged = true;
    }
  }
  return out;
}

absl::StatusOr<EigenspaceProjection> TopEigenspaceProjection(
    const CovarianceSummary& cov, int k) {
  const int d = static_cast<int>(cov.basis.cols());
  if (k < 1 || k > d) {
    return absl::InvalidArgumentError(
        absl::StrCat("subspace dimension must be in [1, ", d, "], got ", k));
  }
  EigenspaceProjection out;
  out.basis = cov.basis.leftCols(k);
  out.projector = out.basis * out.basis.transpose();
  return out;
}

absl::StatusOr<QueryMatrix> ProjectQuery(const QueryMatrix& f,
                                         const Eigen::MatrixXd& basis) {
  if (basis.rows() != f.d() || basis.cols() < 1 || basis.cols() > f.d()) {
    return absl::InvalidArgumentError(
        absl::StrCat("basis is ", basis.rows(), "x", basis.cols(),
                     ", query has d=", f.d()));
  }
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const double off =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (off > 1e-6) {
    return absl::InvalidArgumentError(
        absl::StrCat("basis is not orthonormal (Gram error ", off, ")"));
  }
  RowMatrix projected = basis.transpose() * f.entries();
  return QueryMatrix::CreateUnbounded(std::move(projected));
}

}  // namespace knorm
