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


#include "knorm/harness.h"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

namespace knorm {
namespace {

absl::StatusOr<ExperimentConfig> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseExperimentConfig(in);
}

TEST(ConfigTest, ParsesAllKeys) {
  absl::StatusOr<ExperimentConfig> cfg = Parse(
      "# comment\n"
      "dims = 2, 4\n"
      "n = 16\n"
      "eps = 0.5\n"
      "mechanisms = laplace,knorm\n"
      "trials = 10\n"
      "seed = 3\n"
      "sampler = grid-walk\n"
      "walk_beta = 0.25\n"
      "bound_trials = 0\n");
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  EXPECT_EQ(cfg->dims, (std::vector<int>{2, 4}));
  EXPECT_EQ(cfg->n, 16);
  EXPECT_DOUBLE_EQ(cfg->eps, 0.5);
  EXPECT_EQ(cfg->mechanisms.size(), 2u);
  EXPECT_EQ(cfg->sampler, SamplerChoice::kGridWalk);
  EXPECT_DOUBLE_EQ(cfg->walk_beta, 0.25);
  EXPECT_EQ(cfg->bound_trials, 0);
}

TEST(ConfigTest, Rejections) {
  const std::string base = "dims=2\nn=4\nmechanisms=laplace\n";
  EXPECT_TRUE(Parse(base + "trials=5\n").ok());
  EXPECT_FALSE(Parse(base + "trials=0\n").ok());
  EXPECT_FALSE(Parse(base + "trials=5\ncolour=red\n").ok());
  EXPECT_FALSE(Parse(base + "trials=5\nn=8\n").ok());
  EXPECT_FALSE(Parse(base + "trials=5\neps=-1\n").ok());
  EXPECT_FALSE(Parse(base + "trials=five\n").ok());
  EXPECT_FALSE(Parse("dims=8\nn=4\nmechanisms=laplace\ntrials=5\n").ok());
  EXPECT_FALSE(Parse("dims=2\nn=4\nmechanisms=magic\ntrials=5\n").ok());
  EXPECT_FALSE(Parse(base + "trials 5\n").ok());
}

TEST(ConfigTest, MissingFile) {
  EXPECT_EQ(ReadExperimentConfigFile("/nonexistent/cfg").status().code(),
            absl::StatusCode::kNotFound);
}

ExperimentConfig Small() {
  ExperimentConfig cfg;
  cfg.dims = {1, 2};
  cfg.n = 8;
  cfg.mechanisms = {"laplace", "knorm", "gaussian"};
  cfg.trials = 500;
  cfg.seed = 11;
  cfg.bound_trials = 20000;
  return cfg;
}

std::string Csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  WriteResultsCsv(rows, out);
  return out.str();
}

TEST(RunExperimentTest, RowsAndColumns) {
  absl::StatusOr<std::vector<ResultRow>> rows = RunExperiment(Small());
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 6u);
  for (const ResultRow& r : *rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.seed, 11u);
    EXPECT_EQ(r.trials, 500);
    EXPECT_GT(r.mean_error, 0.0);
    EXPECT_GT(r.knorm_ref, 0.0);
    EXPECT_LE(r.vol_lb, r.gvol_lb + 1e-9);
  }
  EXPECT_EQ((*rows)[0].d, 1);
  EXPECT_EQ((*rows)[3].d, 2);
  EXPECT_EQ((*rows)[4].mechanism, "knorm");
  const std::string csv = Csv(*rows);
  EXPECT_EQ(csv.rfind("d,n,eps,mechanism,trials,mean_error,std_error,vol_lb,"
                      "gvol_lb,knorm_ref,laplace_ref,seed,error\n",
                      0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(RunExperimentTest, SameSeedSameBytes) {
  const std::string a = Csv(*RunExperiment(Small()));
  const std::string b = Csv(*RunExperiment(Small()));
  EXPECT_EQ(a, b);
  ExperimentConfig other = Small();
  other.seed = 12;
  EXPECT_NE(a, Csv(*RunExperiment(other)));
}

TEST(RunExperimentTest, WritesFiles) {
  ExperimentConfig cfg = Small();
  cfg.dims = {1};
  cfg.bound_trials = 0;
  const std::string path =
      (std::filesystem::temp_directory_path() / "knorm_harness_test.csv")
          .string();
  cfg.output = path;
  ASSERT_TRUE(RunExperiment(cfg).ok());
  std::ifstream csv(path);
  std::ifstream json(path + ".json");
  EXPECT_TRUE(csv.good());
  const nlohmann::json j = nlohmann::json::parse(json);
  EXPECT_EQ(j.size(), 3u);
  EXPECT_TRUE(j[0]["vol_lb"].is_null());
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

// In one dimension K is an interval and the K-norm mechanism is Laplace.
TEST(RunExperimentTest, OneDimensionalKNormMatchesLaplace) {
  ExperimentConfig cfg;
  cfg.dims = {1};
  cfg.n = 4;
  cfg.mechanisms = {"laplace", "knorm"};
  cfg.trials = 100000;
  cfg.seed = 5;
  cfg.bound_trials = 0;
  absl::StatusOr<std::vector<ResultRow>> rows = RunExperiment(cfg);
  ASSERT_TRUE(rows.ok());
  const double laplace = (*rows)[0].mean_error;
  const double knorm = (*rows)[1].mean_error;
  EXPECT_NEAR(knorm / laplace, 1.0, 0.05);
  EXPECT_NEAR(laplace, 1.0, 0.02);
}

ResultRow Row(int d, const std::string& mech, double err) {
  ResultRow r;
  r.d = d;
  r.mechanism = mech;
  r.mean_error = err;
  r.knorm_ref = 1.0;
  return r;
}

TEST(CompareToTheoryTest, FlatKNormAndGrowingLaplace) {
  std::vector<ResultRow> rows;
  for (int d : {2, 4, 8}) {
    rows.push_back(Row(d, "knorm", 1.0));
    rows.push_back(Row(d, "laplace", std::log(static_cast<double>(d))));
  }
  absl::StatusOr<TrendReport> r = CompareToTheory(rows);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->knorm_spread, 1.0);
  EXPECT_TRUE(r->laplace_increasing);
  EXPECT_TRUE(r->pass);
  EXPECT_EQ(TrendReportToJson(*r)["verdict"], "PASS");
}

TEST(CompareToTheoryTest, FailsOnSpreadOrFlatLaplace) {
  std::vector<ResultRow> rows;
  for (int d : {2, 4, 8}) {
    rows.push_back(Row(d, "knorm", d));
    rows.push_back(Row(d, "laplace", d * 2.0));
  }
  absl::StatusOr<TrendReport> r = CompareToTheory(rows);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->knorm_spread, 4.0);
  EXPECT_FALSE(r->pass);
  for (ResultRow& row : rows) {
    if (row.mechanism == "knorm") row.mean_error = 1.0;
    if (row.mechanism == "laplace") row.mean_error = 2.0;
  }
  r = CompareToTheory(rows);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->laplace_increasing);
  EXPECT_FALSE(r->pass);
}

TEST(CompareToTheoryTest, NeedsThreeDimensions) {
  std::vector<ResultRow> rows = {Row(2, "knorm", 1), Row(2, "laplace", 1),
                                 Row(4, "knorm", 1), Row(4, "laplace", 1),
                                 Row(8, "knorm", 1)};
  EXPECT_FALSE(CompareToTheory(rows).ok());
  ResultRow failed = Row(8, "laplace", 1);
  failed.error = "boom";
  rows.push_back(failed);
  EXPECT_FALSE(CompareToTheory(rows).ok());
}

}  // namespace
}  // namespace knorm
