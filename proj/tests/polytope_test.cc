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


#include "knorm/polytope.h"

#include <cmath>

#include "gtest/gtest.h"
#include "knorm/query_model.h"
#include "knorm/random.h"

namespace knorm {
namespace {

PolytopeHandle CrossPolytope(int d, PolytopeOptions opts = {}) {
  return *PolytopeHandle::Create(
      *QueryMatrix::Create(RowMatrix::Identity(d, d)), opts);
}

TEST(MembershipTest, CrossPolytope) {
  const PolytopeHandle h = CrossPolytope(2);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.5, 0.49)),
            Membership::kInside);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.8, 0.8)),
            Membership::kOutside);
}

TEST(MembershipTest, HypercubeContainsCube) {
  const PolytopeHandle h = *PolytopeHandle::Create(*HypercubeQuery(2));
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.99, -0.99)),
            Membership::kInside);
}

TEST(MembershipTest, ScaledBody) {
  const PolytopeHandle h = CrossPolytope(2);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.8, 0.8), 2.0),
            Membership::kInside);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.8, 0.8), 1.5),
            Membership::kOutside);
}

TEST(MembershipTest, PlainBodyIsExact) {
  // The plain body is decided by an exact LP, so there is no band.
  const PolytopeHandle h = CrossPolytope(2);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.5, 0.5 + 2e-4)),
            Membership::kOutside);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(0.5, 0.5 - 2e-4)),
            Membership::kInside);
}

TEST(MembershipTest, InflatedBodyNearBoundary) {
  const PolytopeHandle h = CrossPolytope(2, {.inflate = true, .eta = 1e-3});
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(2.0 + 2e-4, 0.0)),
            Membership::kOutside);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(2.0 - 2e-4, 0.0)),
            Membership::kInside);
}

TEST(MembershipTest, InflatedBody) {
  // K + B_2 for the cross-polytope: (1.5, 0) is at distance 0.5 from K.
  const PolytopeHandle h = CrossPolytope(2, {.inflate = true, .eta = 1e-3});
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(1.5, 0.0)),
            Membership::kInside);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(2.5, 0.0)),
            Membership::kOutside);
  // (1, 1): distance to the segment x + y = 1 is 1/sqrt(2) < 1.
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(1.0, 1.0)),
            Membership::kInside);
  // Along the diagonal the boundary is at (1/2 + 1/sqrt 2)(1, 1).
  const double t = 0.5 + std::sqrt(0.5);
  EXPECT_EQ(*TestMembership(h, Eigen::Vector2d(t + 0.01, t + 0.01)),
            Membership::kOutside);
  EXPECT_NEAR(*MinkowskiNorm(h, Eigen::Vector2d(t, t)), 1.0, 1e-3);
  EXPECT_NEAR(*MinkowskiNorm(h, Eigen::Vector2d(2.0, 0.0)), 1.0, 1e-3);
}

TEST(MembershipTest, RejectsWrongDimension) {
  const PolytopeHandle h = CrossPolytope(2);
  EXPECT_FALSE(TestMembership(h, Eigen::Vector3d::Zero()).ok());
}

TEST(PolytopeHandleTest, Geometry) {
  const PolytopeHandle h = *PolytopeHandle::Create(*HypercubeQuery(3));
  EXPECT_EQ(h.d(), 3);
  EXPECT_EQ(h.n(), 8);
  EXPECT_NEAR(h.outer_radius(), std::sqrt(3.0), 1e-12);
  EXPECT_EQ(h.half_widths(), Eigen::Vector3d::Ones());
  EXPECT_FALSE(PolytopeHandle::Create(*HypercubeQuery(2), {.eta = -1.0}).ok());
}

TEST(MembershipNameTest, Names) {
  EXPECT_STREQ(MembershipName(Membership::kInside), "inside");
  EXPECT_STREQ(MembershipName(Membership::kOutside), "outside");
  EXPECT_STREQ(MembershipName(Membership::kBoundaryBand), "boundary-band");
}

}  // namespace
}  // namespace knorm
