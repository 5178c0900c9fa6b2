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

// knorm: command-line front end for query generation, experiment runs,
// bounds, privacy audits and the tiny-instance LP.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "knorm/auditor.h"
#include "knorm/bounds.h"
#include "knorm/covariance.h"
#include "knorm/harness.h"
#include "knorm/mechanisms.h"
#include "knorm/polytope.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/samplers.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAuditFail = 3;

int Fail(const absl::Status& status) {
  std::cerr << "knorm: " << status << "\n";
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

// Writes to `path`, or stdout when it is empty or "-".
absl::Status Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path);
  if (!out) return absl::NotFoundError("cannot open " + path + " for writing");
  out << text;
  return out ? absl::OkStatus()
             : absl::InternalError("write to " + path + " failed");
}

struct GenArgs {
  std::string kind = "random";
  int d = 2;
  int n = 16;
  std::uint64_t seed = 0;
  std::string out;
};

int RunGen(const GenArgs& a) {
  knorm::RngStream rng(a.seed, 0);
  absl::StatusOr<knorm::QueryMatrix> f;
  if (a.kind == "random") {
    f = knorm::RandomBernoulliQuery(a.d, a.n, rng);
  } else if (a.kind == "hypercube") {
    f = knorm::HypercubeQuery(a.d);
  } else if (a.kind == "skewed") {
    f = knorm::RandomSkewedQuery(a.d, a.n, rng);
  } else {
    return Fail(absl::InvalidArgumentError(
        "--kind must be random, hypercube or skewed"));
  }
  if (!f.ok()) return Fail(f.status());
  std::ostringstream text;
  knorm::WriteQueryMatrix(*f, text);
  absl::Status s = Emit(a.out, text.str());
  return s.ok() ? kExitOk : Fail(s);
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string database;
  bool compare = false;
};

int RunRun(const RunArgs& a) {
  absl::StatusOr<knorm::ExperimentConfig> cfg =
      knorm::ReadExperimentConfigFile(a.config);
  if (!cfg.ok()) return Fail(cfg.status());
  if (a.seed.has_value()) cfg->seed = *a.seed;
  if (!a.output.empty()) cfg->output = a.output;
  if (!a.database.empty()) cfg->database = a.database;
  absl::StatusOr<std::vector<knorm::ResultRow>> rows =
      knorm::RunExperiment(*cfg);
  if (!rows.ok()) return Fail(rows.status());
  if (cfg->output.empty()) knorm::WriteResultsCsv(*rows, std::cout);
  int failed_cells = 0;
  for (const knorm::ResultRow& row : *rows) {
    if (!row.error.empty()) {
      ++failed_cells;
      std::cerr << "knorm: cell d=" << row.d << " " << row.mechanism
                << " failed: " << row.error << "\n";
    }
  }
  if (a.compare) {
    absl::StatusOr<knorm::TrendReport> trend = knorm::CompareToTheory(*rows);
    if (!trend.ok()) return Fail(trend.status());
    std::cerr << knorm::TrendReportToJson(*trend).dump(2) << "\n";
  }
  return failed_cells == 0 ? kExitOk : kExitRuntime;
}

struct BoundsArgs {
  std::string query;
  double eps = 1.0;
  std::uint64_t seed = 0;
  std::int64_t trials = 1'000'000;
  std::string out;
};

int RunBounds(const BoundsArgs& a) {
  absl::StatusOr<knorm::QueryMatrix> f = knorm::ReadQueryMatrixFile(a.query);
  if (!f.ok()) return Fail(f.status());
  knorm::RngStream rng(a.seed, 0);
  absl::StatusOr<knorm::PolytopeHandle> handle =
      knorm::PolytopeHandle::Create(*f);
  if (!handle.ok()) return Fail(handle.status());
  absl::StatusOr<std::unique_ptr<knorm::PointSampler>> sampler =
      knorm::MakeSampler(*handle, knorm::SamplerChoice::kAuto, {}, rng);
  if (!sampler.ok()) return Fail(sampler.status());
  absl::StatusOr<knorm::CovarianceSummary> cov = knorm::EstimateCovariance(
      *handle, knorm::DefaultCovarianceSamples(f->d()), **sampler, rng);
  if (!cov.ok()) return Fail(cov.status());
  absl::StatusOr<knorm::BoundReport> report =
      knorm::GVolLb(*f, a.eps, *cov, rng, a.trials);
  if (!report.ok()) return Fail(report.status());
  absl::Status s =
      Emit(a.out, knorm::BoundReportToJson(*report).dump(2) + "\n");
  return s.ok() ? kExitOk : Fail(s);
}

struct AuditArgs {
  std::string mechanism = "knorm";
  std::string query;
  std::string check = "ratio";
  double eps = 1.0;
  double delta = 0.0;
  double k = 2.0;
  std::uint64_t seed = 0;
  knorm::AuditConfig cfg;
  std::string out;
};

int RunAudit(const AuditArgs& a) {
  absl::StatusOr<knorm::MechanismKind> kind =
      knorm::ParseMechanismKind(a.mechanism);
  if (!kind.ok()) return Fail(kind.status());
  absl::StatusOr<knorm::QueryMatrix> f = knorm::ReadQueryMatrixFile(a.query);
  if (!f.ok()) return Fail(f.status());
  absl::StatusOr<std::unique_ptr<knorm::Mechanism>> mech =
      knorm::MakeMechanism(*kind, *f, {a.eps, a.delta});
  if (!mech.ok()) return Fail(mech.status());
  knorm::AuditTarget target = knorm::TargetFromMechanism(**mech);
  knorm::RngStream rng(a.seed, 0);

  nlohmann::json report;
  knorm::Verdict verdict;
  if (a.check == "ratio" || a.check == "transitivity") {
    knorm::Database x = knorm::Database::Zero(f->n());
    knorm::Database x_far = x;
    absl::StatusOr<knorm::AuditReport> r;
    if (a.check == "ratio") {
      x_far(0) = 1.0;
      r = knorm::RatioAudit(target, {x, x_far}, a.eps, a.cfg, rng);
    } else {
      x_far(0) = a.k;
      r = knorm::TransitivityCheck(target, x, x_far, a.k, a.eps, a.cfg, rng);
    }
    if (!r.ok()) return Fail(r.status());
    report = knorm::AuditReportToJson(*r);
    verdict = r->verdict;
  } else if (a.check == "packing") {
    absl::StatusOr<knorm::PackingReport> r =
        knorm::PackingErrorCheck(target, *f, a.eps, rng);
    if (!r.ok()) return Fail(r.status());
    report = {{"mechanism", a.mechanism},
              {"eps", a.eps},
              {"lambda", r->lambda},
              {"rho", r->rho},
              {"packing_size", r->packing_size},
              {"required_size", r->required_size},
              {"lower_bound", r->lower_bound},
              {"measured_error", r->measured_error},
              {"verdict", knorm::VerdictName(r->verdict)}};
    verdict = r->verdict;
  } else {
    return Fail(absl::InvalidArgumentError(
        "--check must be ratio, transitivity or packing"));
  }
  absl::Status s = Emit(a.out, report.dump(2) + "\n");
  if (!s.ok()) return Fail(s);
  return verdict == knorm::Verdict::kFail ? kExitAuditFail : kExitOk;
}

struct LpArgs {
  std::string instance;
  double eps = 1.0;
  int cap = knorm::kDefaultLpCap;
  std::string out;
};

int RunLp(const LpArgs& a) {
  std::ifstream in(a.instance);
  if (!in) return Fail(absl::NotFoundError("cannot open " + a.instance));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return Fail(absl::InvalidArgumentError(a.instance + " is not valid JSON"));
  }
  absl::StatusOr<knorm::TinyInstance> inst = knorm::TinyInstanceFromJson(j);
  if (!inst.ok()) return Fail(inst.status());
  absl::StatusOr<knorm::LpReport> report =
      knorm::LpOptimalError(*inst, a.eps, a.cap);
  if (!report.ok()) return Fail(report.status());
  absl::Status s = Emit(a.out, knorm::LpReportToJson(*report).dump(2) + "\n");
  return s.ok() ? kExitOk : Fail(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry-aware differentially private linear queries"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a query matrix file");
  gen_cmd->add_option("--kind", gen.kind, "random, hypercube or skewed")
      ->capture_default_str();
  gen_cmd->add_option("-d,--dim", gen.d, "Number of queries")
      ->capture_default_str();
  gen_cmd->add_option("-n,--universe", gen.n, "Universe size")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output path (default stdout)");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", run.config, "key=value config file")
      ->required();
  run_cmd->add_option("--seed", run.seed, "Overrides the config seed");
  run_cmd->add_option("-o,--output", run.output, "Overrides the CSV path");
  run_cmd->add_option("--database", run.database, "Database file");
  run_cmd->add_flag("--compare", run.compare,
                    "Print the theory trend report to stderr");

  BoundsArgs bounds;
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "Volume lower bounds for a query file");
  bounds_cmd->add_option("query", bounds.query)->required();
  bounds_cmd->add_option("--eps", bounds.eps)->capture_default_str();
  bounds_cmd->add_option("--trials", bounds.trials)->capture_default_str();
  bounds_cmd->add_option("--seed", bounds.seed)->capture_default_str();
  bounds_cmd->add_option("-o,--out", bounds.out);

  AuditArgs audit;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Empirical privacy or packing audit");
  audit_cmd->add_option("query", audit.query)->required();
  audit_cmd->add_option("-m,--mechanism", audit.mechanism)
      ->capture_default_str();
  audit_cmd->add_option("--check", audit.check,
                        "ratio, transitivity or packing")
      ->capture_default_str();
  audit_cmd->add_option("--eps", audit.eps)->capture_default_str();
  audit_cmd->add_option("--delta", audit.delta)->capture_default_str();
  audit_cmd->add_option("-k", audit.k, "Database distance for transitivity")
      ->capture_default_str();
  audit_cmd->add_option("--trials", audit.cfg.trials)->capture_default_str();
  audit_cmd->add_option("--bin-width", audit.cfg.bin_width)
      ->capture_default_str();
  audit_cmd->add_option("--tolerance", audit.cfg.tolerance)
      ->capture_default_str();
  audit_cmd->add_option("--seed", audit.seed)->capture_default_str();
  audit_cmd->add_option("-o,--out", audit.out);

  LpArgs lp;
  CLI::App* lp_cmd =
      app.add_subcommand("lp", "Optimal-mechanism LP on a tiny instance");
  lp_cmd->add_option("instance", lp.instance, "JSON instance")->required();
  lp_cmd->add_option("--eps", lp.eps)->capture_default_str();
  lp_cmd->add_option("--cap", lp.cap, "Variable cap")->capture_default_str();
  lp_cmd->add_option("-o,--out", lp.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (gen_cmd->parsed()) return RunGen(gen);
  if (run_cmd->parsed()) return RunRun(run);
  if (bounds_cmd->parsed()) return RunBounds(bounds);
  if (audit_cmd->parsed()) return RunAudit(audit);
  if (lp_cmd->parsed()) return RunLp(lp);
  return kExitValidation;
}
