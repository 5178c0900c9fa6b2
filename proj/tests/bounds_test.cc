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


#include "knorm/bounds.h"

#include <cmath>

#include "gtest/gtest.h"
#include "knorm/covariance.h"
#include "knorm/polytope.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/samplers.h"

namespace knorm {
namespace {

CovarianceSummary CovarianceOf(const QueryMatrix& f, RngStream& rng) {
  const PolytopeHandle h = *PolytopeHandle::Create(f);
  std::unique_ptr<PointSampler> s =
      *MakeSampler(h, SamplerChoice::kAuto, {}, rng);
  absl::StatusOr<CovarianceSummary> cov =
      EstimateCovariance(h, 20'000, *s, rng);
  EXPECT_TRUE(cov.ok()) << cov.status();
  return *cov;
}

TEST(VolLbTest, CrossPolytope) {
  RngStream rng(1, 0);
  absl::StatusOr<VolLbResult> r =
      VolLb(*QueryMatrix::Create(RowMatrix::Identity(2, 2)), 1.0, rng, 400'000);
  ASSERT_TRUE(r.ok());
  // 2 sqrt 2 * vol(B_1^2)^{1/2} = 2 sqrt 2 * sqrt 2.
  EXPECT_NEAR(r->value, 4.0, 0.04);
  EXPECT_LE(r->ci_low, 4.0 + 1e-9 + 0.01);
  EXPECT_GE(r->ci_high, 4.0 - 0.01);
}

TEST(VolLbTest, Cube) {
  RngStream rng(2, 0);
  absl::StatusOr<VolLbResult> r = VolLb(*HypercubeQuery(2), 1.0, rng, 100'000);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->value, 4.0 * std::sqrt(2.0), 0.02 * 4.0 * std::sqrt(2.0));
}

TEST(VolLbTest, EpsilonScaling) {
  RngStream a(3, 0), b(3, 0);
  const QueryMatrix f = *HypercubeQuery(2);
  EXPECT_NEAR(VolLb(f, 1.0, a, 10'000)->value,
              2.0 * VolLb(f, 2.0, b, 10'000)->value, 1e-12);
  EXPECT_FALSE(VolLb(f, 0.0, a, 10).ok());
}

TEST(VolLbTest, DuplicateColumnLeavesBoundUnchanged) {
  RngStream rng(4, 0);
  const QueryMatrix f = *RandomBernoulliQuery(3, 6, rng);
  RowMatrix dup(3, 7);
  dup.leftCols(6) = f.entries();
  dup.col(6) = f.entries().col(2);
  RngStream r1(5, 0), r2(5, 0);
  EXPECT_EQ(VolLb(f, 1.0, r1, 50'000)->value,
            VolLb(*QueryMatrix::Create(dup), 1.0, r2, 50'000)->value);
}

TEST(VolLbTest, HypercubeSeparation) {
  // vol(K)^{1/d} = 2 exactly, so vol_lb = 2 d sqrt d.
  RngStream rng(6, 0);
  absl::StatusOr<VolLbResult> r = VolLb(*HypercubeQuery(8), 1.0, rng, 20'000);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->value, 16.0 * std::sqrt(8.0), 1e-9);
  EXPECT_GT(r->value, ComputeTheoryCurves(8, 256, 1.0, 0.1)->gauss_ref);
}

TEST(GVolLbTest, IsotropicCube) {
  RngStream rng(7, 0);
  const QueryMatrix f = *HypercubeQuery(2);
  absl::StatusOr<BoundReport> r =
      GVolLb(f, 1.0, CovarianceOf(f, rng), rng, 200'000);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->gvol_lb, r->vol_lb, 0.1 * r->vol_lb);
  ASSERT_EQ(r->per_k.size(), 2u);
  // The k = d term is vol_lb measured in rotated coordinates.
  EXPECT_NEAR(r->per_k[1].value, r->vol_lb, 0.03 * r->vol_lb);
  EXPECT_GE(r->gvol_lb + 1e-12, r->per_k[0].value);
  EXPECT_GE(r->gvol_lb + 1e-12, r->per_k[1].value);
}

TEST(GVolLbTest, SkewedBodyAttainedByFirstAxis) {
  RngStream rng(8, 0);
  const QueryMatrix f = *RandomSkewedQuery(4, 12, rng);
  absl::StatusOr<BoundReport> r =
      GVolLb(f, 1.0, CovarianceOf(f, rng), rng, 200'000);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->gvol_k, 1);
  // The top eigenvector is the first axis, whose projection is [-1, 1].
  EXPECT_NEAR(r->per_k[0].value, 2.0, 0.01);
  EXPECT_GT(r->gvol_lb, r->vol_lb);
}

TEST(GVolLbTest, JsonFields) {
  RngStream rng(9, 0);
  const QueryMatrix f = *HypercubeQuery(2);
  absl::StatusOr<BoundReport> r =
      GVolLb(f, 1.0, CovarianceOf(f, rng), rng, 10'000);
  ASSERT_TRUE(r.ok());
  const nlohmann::json j = BoundReportToJson(*r);
  for (const char* key :
       {"vol_lb", "gvol_lb", "per_k", "volume_ci", "alpha_assumption"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["per_k"].size(), 2u);
}

TEST(TheoryCurvesTest, Arithmetic) {
  absl::StatusOr<TheoryCurves> c = ComputeTheoryCurves(4, 1024, 1.0);
  ASSERT_TRUE(c.ok());
  EXPECT_DOUBLE_EQ(c->knorm_ref, 8.0);
  EXPECT_DOUBLE_EQ(c->laplace_ref, 8.0);
  EXPECT_NEAR(ComputeTheoryCurves(16, 1024, 1.0)->knorm_ref,
              16.0 * std::sqrt(std::log(64.0)), 1e-12);
  EXPECT_NEAR(ComputeTheoryCurves(16, 1024, 1.0)->knorm_ref, 32.6, 0.05);
  EXPECT_NEAR(c->gauss_ref, 4.0 * std::sqrt(std::log(10.0)), 1e-12);

  absl::StatusOr<TheoryCurves> half = ComputeTheoryCurves(4, 1024, 2.0);
  EXPECT_DOUBLE_EQ(half->knorm_ref, c->knorm_ref / 2);
  EXPECT_DOUBLE_EQ(half->laplace_ref, c->laplace_ref / 2);
  EXPECT_DOUBLE_EQ(half->gauss_ref, c->gauss_ref / 2);

  EXPECT_FALSE(ComputeTheoryCurves(8, 12, 1.0).ok());
  EXPECT_FALSE(ComputeTheoryCurves(2, 8, 1.0, 0.0).ok());
}

}  // namespace
}  // namespace knorm
