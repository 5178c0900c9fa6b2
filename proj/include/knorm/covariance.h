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

#ifndef KNORM_COVARIANCE_H_
#define KNORM_COVARIANCE_H_

#include <cstdint>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "knorm/polytope.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/samplers.h"

namespace knorm {

// Estimated second-moment matrix M_ij = E[x_i x_j] of the uniform measure
// on a body, with its spectrum.
struct CovarianceSummary {
  Eigen::MatrixXd m;
  // Eigenvalues sorted descending.
  Eigen::VectorXd sigma;
  // Column i is the unit eigenvector for sigma(i).
  Eigen::MatrixXd basis;
  std::int64_t samples = 0;

  // Empirical mean of the draws and its per-coordinate standard error. The
  // body is symmetric, so a coordinate more than 3 standard errors from 0
  // points at a sampler bug.
  Eigen::VectorXd mean;
  Eigen::VectorXd mean_se;
  bool mean_flagged = false;
};

// max(1000, d^4).
std::int64_t DefaultCovarianceSamples(int d);

// Second moments about the origin of `sample_count` draws.
absl::StatusOr<CovarianceSummary> EstimateCovariance(
    const PolytopeHandle& handle, std::int64_t sample_count,
    PointSampler& sampler, RngStream& rng);

// Summary of a given symmetric matrix; used for exact or synthetic inputs.
absl::StatusOr<CovarianceSummary> SummarizeCovariance(const Eigen::MatrixXd& m);

struct EigenspaceProjection {
  // P_U = U U^T.
  Eigen::MatrixXd projector;
  // d x k, the top-k eigenvectors.
  Eigen::MatrixXd basis;
};

absl::StatusOr<EigenspaceProjection> TopEigenspaceProjection(
    const CovarianceSummary& cov, int k);

// basis^T F, a k x n query in subspace coordinates. Entries may leave
// [-1, 1]; the result carries its own sensitivity. Fails unless
// basis^T basis = I to within 1e-6.
absl::StatusOr<QueryMatrix> ProjectQuery(const QueryMatrix& f,
                                         const Eigen::MatrixXd& basis);

}  // namespace knorm

#endif  // KNORM_COVARIANCE_H_
