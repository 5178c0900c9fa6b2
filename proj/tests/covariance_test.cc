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

#include <cmath>

#include "gtest/gtest.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/samplers.h"
#include "knorm/volume.h"

namespace knorm {
namespace {

CovarianceSummary Estimate(const PolytopeHandle& h, std::int64_t count,
                           std::uint64_t seed) {
  RngStream rng(seed, 0);
  RejectionSampler sampler(h);
  absl::StatusOr<CovarianceSummary> cov =
      EstimateCovariance(h, count, sampler, rng);
  EXPECT_TRUE(cov.ok()) << cov.status();
  return *cov;
}

TEST(EstimateCovarianceTest, Cube) {
  const PolytopeHandle h = *PolytopeHandle::Create(*HypercubeQuery(2));
  const CovarianceSummary cov = Estimate(h, 400'000, 1);
  EXPECT_NEAR(cov.m(0, 0), 1.0 / 3.0, 0.02 / 3.0);
  EXPECT_NEAR(cov.m(1, 1), 1.0 / 3.0, 0.02 / 3.0);
  EXPECT_NEAR(cov.m(0, 1), 0.0, 0.02 / 3.0);
  EXPECT_FALSE(cov.mean_flagged);
}

TEST(EstimateCovarianceTest, CrossPolytope) {
  const PolytopeHandle h = *PolytopeHandle::Create(
      *QueryMatrix::Create(RowMatrix::Identity(2, 2)));
  const CovarianceSummary cov = Estimate(h, 400'000, 2);
  EXPECT_NEAR(cov.m(0, 0), 1.0 / 6.0, 0.03 / 6.0);
  EXPECT_NEAR(cov.m(1, 1), 1.0 / 6.0, 0.03 / 6.0);
  EXPECT_NEAR(cov.m(0, 1), 0.0, 0.03 / 6.0);
}

TEST(EstimateCovarianceTest, EigenvaluesDescending) {
  RngStream rng(3, 0);
  const PolytopeHandle h =
      *PolytopeHandle::Create(*RandomSkewedQuery(3, 16, rng));
  const CovarianceSummary cov = Estimate(h, 50'000, 3);
  EXPECT_GE(cov.sigma(0), cov.sigma(1));
  EXPECT_GE(cov.sigma(1), cov.sigma(2));
  // The first axis is 9 times longer than the others.
  EXPECT_GT(cov.sigma(0), 20.0 * cov.sigma(1));
  EXPECT_GT(std::abs(cov.basis(0, 0)), 0.99);
}

TEST(EstimateCovarianceTest, IsotropicConstantOfCube) {
  // det(M)^{1/d} / vol^{2/d} = 1/12 for every cube.
  for (int d : {2, 3}) {
    const PolytopeHandle h = *PolytopeHandle::Create(*HypercubeQuery(d));
    const CovarianceSummary cov = Estimate(h, 200'000, 10 + d);
    RngStream rng(20 + d, 0);
    absl::StatusOr<VolumeEstimate> vol = EstimateVolumeRadius(h, rng, 200'000);
    ASSERT_TRUE(vol.ok());
    const double ratio =
        std::pow(cov.m.determinant(), 1.0 / d) / (vol->radius * vol->radius);
    EXPECT_NEAR(ratio, 1.0 / 12.0, 0.1 / 12.0) << "d=" << d;
  }
}

TEST(EstimateCovarianceTest, RejectsTooFewSamples) {
  const PolytopeHandle h = *PolytopeHandle::Create(*HypercubeQuery(2));
  RngStream rng(1, 0);
  RejectionSampler sampler(h);
  EXPECT_FALSE(EstimateCovariance(h, 1, sampler, rng).ok());
}

TEST(DefaultCovarianceSamplesTest, Floor) {
  EXPECT_EQ(DefaultCovarianceSamples(2), 1000);
  EXPECT_EQ(DefaultCovarianceSamples(8), 4096);
}

TEST(TopEigenspaceProjectionTest, FullAndPartial) {
  absl::StatusOr<CovarianceSummary> cov =
      SummarizeCovariance(Eigen::Vector2d(2.0, 1.0).asDiagonal());
  ASSERT_TRUE(cov.ok());
  absl::StatusOr<EigenspaceProjection> full = TopEigenspaceProjection(*cov, 2);
  ASSERT_TRUE(full.ok());
  EXPECT_TRUE(full->projector.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
  absl::StatusOr<EigenspaceProjection> top = TopEigenspaceProjection(*cov, 1);
  ASSERT_TRUE(top.ok());
  EXPECT_NEAR(top->projector(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(top->projector(1, 1), 0.0, 1e-12);
  EXPECT_NEAR(top->projector(0, 1), 0.0, 1e-12);
  EXPECT_FALSE(TopEigenspaceProjection(*cov, 0).ok());
  EXPECT_FALSE(TopEigenspaceProjection(*cov, 3).ok());
}

TEST(ProjectQueryTest, IdentityAndAxis) {
  RngStream rng(4, 0);
  const QueryMatrix f = *RandomBernoulliQuery(2, 5, rng);
  absl::StatusOr<QueryMatrix> same =
      ProjectQuery(f, Eigen::Matrix2d::Identity());
  ASSERT_TRUE(same.ok());
  EXPECT_EQ(same->entries(), f.entries());

  const QueryMatrix id = *QueryMatrix::Create(RowMatrix::Identity(2, 2));
  absl::StatusOr<QueryMatrix> axis = ProjectQuery(id, Eigen::Vector2d(1, 0));
  ASSERT_TRUE(axis.ok());
  ASSERT_EQ(axis->d(), 1);
  EXPECT_EQ(axis->entries()(0, 0), 1.0);
  EXPECT_EQ(axis->entries()(0, 1), 0.0);

  EXPECT_FALSE(ProjectQuery(id, Eigen::Vector2d(1, 1)).ok());
}

}  // namespace
}  // namespace knorm
