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


#include "knorm/auditor.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "knorm/mechanisms.h"
#include "knorm/polytope.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "testing/oracles.h"

namespace knorm {
namespace {

QueryMatrix OneByTwo() {
  RowMatrix m(1, 2);
  m << 1, -1;
  return *QueryMatrix::Create(m);
}

NeighborPair UnitPair(int n) {
  NeighborPair p{Database::Zero(n), Database::Zero(n)};
  p.x_prime(0) = 1.0;
  return p;
}

AuditTarget ScaledLaplace(const QueryMatrix& f, double scale) {
  return {"scaled-laplace",
          [f, scale](const Database& x,
                     RngStream& rng) -> absl::StatusOr<Eigen::VectorXd> {
            Eigen::VectorXd a = f.entries() * x;
            for (Eigen::Index i = 0; i < a.size(); ++i) {
              a(i) += LaplaceUnchecked(scale, rng);
            }
            return a;
          }};
}

TEST(RatioAuditTest, LaplacePasses) {
  const QueryMatrix f = OneByTwo();
  auto m = *MakeMechanism(MechanismKind::kLaplace, f, {1.0, 0.0});
  RngStream rng(1, 0);
  absl::StatusOr<AuditReport> r =
      RatioAudit(TargetFromMechanism(*m), UnitPair(2), 1.0, {}, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kPass);
  EXPECT_GT(r->bins_tested, 20);
  EXPECT_DOUBLE_EQ(r->bound, std::exp(1.0));
}

TEST(RatioAuditTest, KNormPasses) {
  const QueryMatrix f = OneByTwo();
  auto m = *MakeMechanism(MechanismKind::kKNorm, f, {1.0, 0.0});
  RngStream rng(2, 0);
  absl::StatusOr<AuditReport> r =
      RatioAudit(TargetFromMechanism(*m), UnitPair(2), 1.0, {}, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kPass);
}

TEST(RatioAuditTest, UnderNoisedControlFails) {
  RngStream rng(3, 0);
  absl::StatusOr<AuditReport> r = RatioAudit(
      ScaledLaplace(OneByTwo(), 0.5), UnitPair(2), 1.0, {}, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kFail);
  EXPECT_GT(r->worst_ratio, std::exp(1.0) * 1.15);
}

TEST(RatioAuditTest, StarvedBinsAreInconclusive) {
  RngStream rng(4, 0);
  AuditConfig cfg;
  cfg.trials = 1000;
  absl::StatusOr<AuditReport> r =
      RatioAudit(ScaledLaplace(OneByTwo(), 1.0), UnitPair(2), 1.0, cfg, rng);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->verdict, Verdict::kInconclusive);
  EXPECT_EQ(r->bins_tested, 0);
}

TEST(RatioAuditTest, RejectsNonNeighbors) {
  RngStream rng(4, 1);
  NeighborPair far = UnitPair(2);
  far.x_prime(1) = 1.0;
  EXPECT_FALSE(
      RatioAudit(ScaledLaplace(OneByTwo(), 1.0), far, 1.0, {}, rng).ok());
}

TEST(RatioAuditTest, JsonFields) {
  AuditReport r;
  r.mechanism = "laplace";
  r.eps = 1.0;
  r.verdict = Verdict::kPass;
  const nlohmann::json j = AuditReportToJson(r);
  for (const char* key :
       {"mechanism", "eps", "worst_ratio", "bound", "verdict", "bins_tested"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["verdict"], "pass");
}

TEST(TransitivityCheckTest, LaplaceAtDistanceTwo) {
  const QueryMatrix f = OneByTwo();
  auto m = *MakeMechanism(MechanismKind::kLaplace, f, {1.0, 0.0});
  RngStream rng(5, 0);
  Database x = Database::Zero(2), y = Database::Zero(2);
  y(0) = 2.0;
  absl::StatusOr<AuditReport> r =
      TransitivityCheck(TargetFromMechanism(*m), x, y, 2.0, 1.0, {}, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kPass);
  EXPECT_DOUBLE_EQ(r->bound, std::exp(2.0));
}

TEST(TransitivityCheckTest, DistanceFiveAtSmallEpsilon) {
  const QueryMatrix f = OneByTwo();
  auto m = *MakeMechanism(MechanismKind::kLaplace, f, {0.2, 0.0});
  RngStream rng(6, 0);
  Database x = Database::Zero(2), y = Database::Zero(2);
  y(0) = 5.0;
  absl::StatusOr<AuditReport> r =
      TransitivityCheck(TargetFromMechanism(*m), x, y, 5.0, 0.2, {}, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kPass);
}

TEST(TransitivityCheckTest, RejectsDistanceAboveK) {
  RngStream rng(6, 1);
  Database x = Database::Zero(2), y = Database::Zero(2);
  y(0) = 3.0;
  EXPECT_FALSE(TransitivityCheck(ScaledLaplace(OneByTwo(), 1.0), x, y, 2.0,
                                 1.0, {}, rng)
                   .ok());
}

PolytopeHandle CrossPolytope2() {
  return *PolytopeHandle::Create(
      *QueryMatrix::Create(RowMatrix::Identity(2, 2)));
}

TEST(GreedyPackingTest, ReachesExponentialSize) {
  // lambda = 3, vol(B_1^2)^{1/2} = sqrt 2, target = 0.1 * 3 * sqrt2 * sqrt2.
  const double target = 0.1 * 3.0 * std::sqrt(2.0) * std::sqrt(2.0);
  RngStream rng(7, 0);
  absl::StatusOr<PackingResult> p =
      GreedyPacking(CrossPolytope2(), 3.0, target, rng, 2000);
  ASSERT_TRUE(p.ok()) << p.status();
  EXPECT_GE(static_cast<double>(p->points.size()), std::exp(2.0));
  EXPECT_GE(MinPairwiseDistance(p->points), target);
  for (const auto& pt : p->points) EXPECT_LE(pt.lpNorm<1>(), 3.0 + 1e-9);
}

TEST(GreedyPackingTest, ZeroTargetKeepsEverything) {
  RngStream rng(8, 0);
  absl::StatusOr<PackingResult> p =
      GreedyPacking(CrossPolytope2(), 1.0, 0.0, rng, 100);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->points.size(), 100u);
}

TEST(GreedyPackingTest, HugeTargetKeepsOne) {
  RngStream rng(9, 0);
  absl::StatusOr<PackingResult> p =
      GreedyPacking(CrossPolytope2(), 1.0, 10.0, rng, 100);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->points.size(), 1u);
}

TEST(GreedyPackingTest, BudgetGuard) {
  RngStream rng(9, 1);
  EXPECT_FALSE(GreedyPacking(CrossPolytope2(), 1.0, 0.1, rng, 50).ok());
}

TEST(MinPairwiseDistanceTest, Basic) {
  EXPECT_TRUE(std::isinf(MinPairwiseDistance({})));
  EXPECT_NEAR(MinPairwiseDistance({Eigen::Vector2d(0, 0),
                                   Eigen::Vector2d(3, 4),
                                   Eigen::Vector2d(0, 1)}),
              1.0, 1e-12);
}

TEST(PackingErrorCheckTest, PrivateMechanismsPass) {
  const QueryMatrix f = *QueryMatrix::Create(RowMatrix::Identity(2, 2));
  for (MechanismKind k : {MechanismKind::kKNorm, MechanismKind::kLaplace}) {
    auto m = *MakeMechanism(k, f, {1.0, 0.0});
    RngStream rng(10, static_cast<std::uint64_t>(k));
    absl::StatusOr<PackingReport> r =
        PackingErrorCheck(TargetFromMechanism(*m), f, 1.0, rng);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_EQ(r->verdict, Verdict::kPass) << MechanismName(k);
    EXPECT_GT(r->packing_size, r->required_size);
    EXPECT_GE(r->measured_error, r->lower_bound);
  }
}

TEST(PackingErrorCheckTest, ExactAnswersFail) {
  const QueryMatrix f = *QueryMatrix::Create(RowMatrix::Identity(2, 2));
  AuditTarget exact{"exact",
                    [f](const Database& x,
                        RngStream&) -> absl::StatusOr<Eigen::VectorXd> {
                      return Eigen::VectorXd(f.entries() * x);
                    }};
  RngStream rng(11, 0);
  absl::StatusOr<PackingReport> r = PackingErrorCheck(exact, f, 1.0, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->verdict, Verdict::kFail);
  EXPECT_EQ(r->measured_error, 0.0);
}

// D = {0, 1} on the line, answers on a grid, err = |a - x|.
TinyInstance LineInstance(double lo, double hi, double step) {
  TinyInstance inst;
  for (double x : {0.0, 1.0}) {
    inst.databases.push_back(Eigen::VectorXd::Constant(1, x));
    inst.query_values.push_back(Eigen::VectorXd::Constant(1, x));
  }
  for (double a = lo; a <= hi + 1e-9; a += step) {
    inst.answers.push_back(Eigen::VectorXd::Constant(1, a));
  }
  return inst;
}

// The same LP written out independently and solved by vertex enumeration.
double BruteForceOptimum(const TinyInstance& inst, double eps) {
  const int na = static_cast<int>(inst.answers.size());
  const int nv = 2 * na + 1;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  c(nv - 1) = 1.0;
  Eigen::MatrixXd ub = Eigen::MatrixXd::Zero(2 + 2 * na, nv);
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < na; ++a) {
      ub(x, x * na + a) =
          std::abs(inst.answers[a](0) - inst.query_values[x](0));
    }
    ub(x, nv - 1) = -1.0;
  }
  const double e = std::exp(eps);
  for (int a = 0; a < na; ++a) {
    ub(2 + a, a) = 1.0;
    ub(2 + a, na + a) = -e;
    ub(2 + na + a, na + a) = 1.0;
    ub(2 + na + a, a) = -e;
  }
  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(2, nv);
  eq.block(0, 0, 1, na).setOnes();
  eq.block(1, na, 1, na).setOnes();
  return testing::LpByVertexEnumeration(c, ub,
                                        Eigen::VectorXd::Zero(ub.rows()), eq,
                                        Eigen::Vector2d::Ones());
}

TEST(LpOptimalErrorTest, MatchesVertexEnumeration) {
  const TinyInstance inst = LineInstance(-2.0, 2.0, 1.0);
  absl::StatusOr<LpReport> r = LpOptimalError(inst, 1.0);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_NEAR(r->optimum, BruteForceOptimum(inst, 1.0), 1e-6);
  EXPECT_EQ(r->variables, 11);
  // The table is a valid eps-private mechanism.
  for (int a = 0; a < 5; ++a) {
    EXPECT_LE(r->mu(0, a), std::exp(1.0) * r->mu(1, a) + 1e-9);
    EXPECT_LE(r->mu(1, a), std::exp(1.0) * r->mu(0, a) + 1e-9);
  }
  EXPECT_NEAR(r->mu.row(0).sum(), 1.0, 1e-9);
}

TEST(LpOptimalErrorTest, SandwichesDiscretizedKNorm) {
  for (double step : {1.0, 0.25}) {
    const TinyInstance inst = LineInstance(-2.0, 2.0, step);
    absl::StatusOr<LpReport> r = LpOptimalError(inst, 1.0);
    ASSERT_TRUE(r.ok());
    const Eigen::MatrixXd table =
        ExponentialMechanismTable(inst, 1.0, [&](int x, int a) {
          return std::abs(inst.answers[a](0) - inst.query_values[x](0));
        });
    const double knorm = WorstCaseExpectedError(inst, table);
    EXPECT_LE(r->optimum, knorm + 1e-9) << "step " << step;
    EXPECT_LE(knorm, 3.0 * r->optimum) << "step " << step;
  }
}

TEST(LpOptimalErrorTest, VacuousPrivacy) {
  const TinyInstance inst = LineInstance(-2.0, 2.0, 0.25);
  absl::StatusOr<LpReport> r = LpOptimalError(inst, 1e6);
  ASSERT_TRUE(r.ok());
  // Both databases have an exact answer on the grid.
  EXPECT_NEAR(r->optimum, 0.0, 1e-9);
  const TinyInstance off = LineInstance(-2.1, 1.9, 1.0);
  EXPECT_NEAR(LpOptimalError(off, 1e6)->optimum, 0.1, 1e-9);
}

TEST(LpOptimalErrorTest, VariableCap) {
  const TinyInstance inst = LineInstance(-2.0, 2.0, 0.25);
  EXPECT_EQ(LpOptimalError(inst, 1.0, 10).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(TinyInstanceFromJsonTest, ParsesAndValidates) {
  const nlohmann::json j = {{"databases", {{0.0}, {1.0}}},
                            {"query_values", {{0.0}, {1.0}}},
                            {"answers", {{0.0}, {0.5}, {1.0}}}};
  absl::StatusOr<TinyInstance> inst = TinyInstanceFromJson(j);
  ASSERT_TRUE(inst.ok()) << inst.status();
  EXPECT_EQ(inst->answers.size(), 3u);
  nlohmann::json bad = j;
  bad.erase("answers");
  EXPECT_FALSE(TinyInstanceFromJson(bad).ok());
  bad = j;
  bad["query_values"] = {{0.0}};
  EXPECT_FALSE(TinyInstanceFromJson(bad).ok());
}

TEST(ExponentialMechanismTableTest, RowsAreDistributions) {
  const TinyInstance inst = LineInstance(-2.0, 2.0, 0.5);
  const Eigen::MatrixXd t = ExponentialMechanismTable(
      inst, 2.0, [&](int x, int a) {
        return std::abs(inst.answers[a](0) - inst.query_values[x](0));
      });
  for (int x = 0; x < 2; ++x) EXPECT_NEAR(t.row(x).sum(), 1.0, 1e-12);
  EXPECT_GT(t(0, 4), t(0, 3));
}

}  // namespace
}  // namespace knorm
