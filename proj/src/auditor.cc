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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "knorm/gauge.h"
#include "knorm/lp.h"
#include "knorm/samplers.h"

namespace knorm {
namespace {

using Histogram = std::map<std::int64_t, std::int64_t>;

absl::StatusOr<Histogram> FirstCoordinateHistogram(const AuditTarget& target,
                                                   const Database& x,
                                                   const AuditConfig& cfg,
                                                   RngStream& rng) {
  Histogram h;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    absl::StatusOr<Eigen::VectorXd> a = target.release(x, rng);
    if (!a.ok()) return a.status();
    if (a->size() < 1) return absl::InternalError("empty mechanism output");
    ++h[static_cast<std::int64_t>(std::floor((*a)(0) / cfg.bin_width))];
  }
  return h;
}

struct Interval {
  double low;
  double high;
};

Interval Wilson(std::int64_t count, std::int64_t total, double z) {
  const double n = static_cast<double>(total);
  const double p = count / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

absl::Status CheckConfig(const AuditConfig& cfg, double eps) {
  if (!(cfg.bin_width > 0.0) || cfg.trials < 1 || !(cfg.tolerance > 0.0) ||
      cfg.min_bin_count < 1 || !(cfg.wilson_z > 0.0)) {
    return absl::InvalidArgumentError("audit configuration must be positive");
  }
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", eps));
  }
  return absl::OkStatus();
}

absl::StatusOr<AuditReport> HistogramAudit(const AuditTarget& target,
                                           const Database& x,
                                           const Database& y, double bound,
                                           double eps, const AuditConfig& cfg,
                                           RngStream& rng) {
  absl::StatusOr<Histogram> hx = FirstCoordinateHistogram(target, x, cfg, rng);
  if (!hx.ok()) return hx.status();
  absl::StatusOr<Histogram> hy = FirstCoordinateHistogram(target, y, cfg, rng);
  if (!hy.ok()) return hy.status();

  AuditReport report;
  report.mechanism = target.name;
  report.eps = eps;
  report.bound = bound;
  bool failed = false;
  for (const auto& [bin, cx] : *hx) {
    auto it = hy->find(bin);
    if (it == hy->end()) continue;
    const std::int64_t cy = it->second;
    if (cx < cfg.min_bin_count || cy < cfg.min_bin_count) continue;
    ++report.bins_tested;
    const Interval ix = Wilson(cx, cfg.trials, cfg.wilson_z);
    const Interval iy = Wilson(cy, cfg.trials, cfg.wilson_z);
    const double forward = static_cast<double>(cx) / cy;
    const double backward = static_cast<double>(cy) / cx;
    const double ratio = std::max(forward, backward);
    const double conservative =
        forward >= backward ? ix.low / iy.high : iy.low / ix.high;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_bin = (bin + 0.5) * cfg.bin_width;
    }
    if (ratio > bound * (1.0 + cfg.tolerance) && conservative > bound) {
      failed = true;
    }
  }
  if (report.bins_tested == 0) {
    report.verdict = Verdict::kInconclusive;
  } else {
    report.verdict = failed ? Verdict::kFail : Verdict::kPass;
  }
  return report;
}

}  // namespace

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

AuditTarget TargetFromMechanism(Mechanism& mechanism) {
  AuditTarget target;
  target.name = MechanismName(mechanism.kind());
  target.release = [&mechanism](const Database& x, RngStream& rng)
      -> absl::StatusOr<Eigen::VectorXd> {
    absl::StatusOr<NoiseSample> s = mechanism.Release(x, rng);
    if (!s.ok()) return s.status();
    return std::move(s->answer);
  };
  return target;
}

nlohmann::json AuditReportToJson(const AuditReport& report) {
  return {{"mechanism", report.mechanism},
          {"eps", report.eps},
          {"worst_ratio", report.worst_ratio},
          {"bound", report.bound},
          {"verdict", VerdictName(report.verdict)},
          {"bins_tested", report.bins_tested}};
}

absl::StatusOr<AuditReport> RatioAudit(const AuditTarget& target,
                                       const NeighborPair& pair, double eps,
                                       const AuditConfig& cfg, RngStream& rng) {
  if (absl::Status s = CheckConfig(cfg, eps); !s.ok()) return s;
  if (!pair.IsValid(1.0)) {
    return absl::InvalidArgumentError("databases are not neighbors");
  }
  return HistogramAudit(target, pair.x, pair.x_prime, std::exp(eps), eps, cfg,
                        rng);
}

absl::StatusOr<AuditReport> TransitivityCheck(const AuditTarget& target,
                                              const Database& x,
                                              const Database& x_far, double k,
                                              double eps,
                                              const AuditConfig& cfg,
                                              RngStream& rng) {
  if (absl::Status s = CheckConfig(cfg, eps); !s.ok()) return s;
  NeighborPair pair{x, x_far};
  if (!(k > 0.0) || !pair.IsValid(k)) {
    return absl::InvalidArgumentError(
        absl::StrCat("databases are farther apart than k=", k));
  }
  return HistogramAudit(target, x, x_far, std::exp(eps * k), eps, cfg, rng);
}

double MinPairwiseDistance(const std::vector<Eigen::VectorXd>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, (points[i] - points[j]).norm());
    }
  }
  return best;
}

namespace {

std::vector<Eigen::VectorXd> Greedy(const std::vector<Eigen::VectorXd>& pool,
                                    double target) {
  std::vector<Eigen::VectorXd> kept;
  const double target_sq = target * target;
  for (const Eigen::VectorXd& p : pool) {
    bool ok = true;
    for (const Eigen::VectorXd& q : kept) {
      if ((p - q).squaredNorm() < target_sq) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(p);
  }
  return kept;
}

absl::StatusOr<std::vector<Eigen::VectorXd>> Candidates(
    const PolytopeHandle& handle, double lambda, RngStream& rng,
    std::int64_t budget) {
  RejectionSampler sampler(handle);
  absl::StatusOr<std::vector<Eigen::VectorXd>> pool =
      sampler.DrawMany(budget, rng);
  if (!pool.ok()) return pool.status();
  for (Eigen::VectorXd& p : *pool) p *= lambda;
  return pool;
}

}  // namespace

absl::StatusOr<PackingResult> GreedyPacking(const PolytopeHandle& handle,
                                            double lambda, double target,
                                            RngStream& rng,
                                            std::int64_t budget) {
  const double needed = 10.0 * std::exp(static_cast<double>(handle.d()));
  if (static_cast<double>(budget) < needed) {
    return absl::InvalidArgumentError(absl::StrCat(
        "candidate budget ", budget, " is below 10 e^d = ", needed));
  }
  if (!(lambda > 0.0) || !(target >= 0.0)) {
    return absl::InvalidArgumentError("scale must be positive, target >= 0");
  }
  absl::StatusOr<std::vector<Eigen::VectorXd>> pool =
      Candidates(handle, lambda, rng, budget);
  if (!pool.ok()) return pool.status();
  PackingResult out;
  out.candidates = budget;
  out.points = Greedy(*pool, target);
  return out;
}

absl::StatusOr<PackingReport> PackingErrorCheck(const AuditTarget& target,
                                                const QueryMatrix& f,
                                                double eps, RngStream& rng,
                                                const PackingCheckConfig& cfg) {
  const int d = f.d();
  if (d > 4) {
    return absl::InvalidArgumentError(
        absl::StrCat("packing check runs at d <= 4, got d=", d));
  }
  if (!(eps > 0.0)) return absl::InvalidArgumentError("epsilon must be > 0");
  absl::StatusOr<PolytopeHandle> handle = PolytopeHandle::Create(f);
  if (!handle.ok()) return handle.status();

  PackingReport report;
  report.lambda = d / (2.0 * eps);
  report.required_size = 2.0 * std::exp(d / 2.0);
  const std::int64_t budget =
      cfg.budget > 0 ? cfg.budget
                     : std::max<std::int64_t>(
                           2000, static_cast<std::int64_t>(
                                     std::ceil(10.0 * std::exp(d))));
  absl::StatusOr<std::vector<Eigen::VectorXd>> pool =
      Candidates(*handle, report.lambda, rng, budget);
  if (!pool.ok()) return pool.status();

  // Greedy size is nonincreasing in the radius up to ties; bisect.
  double lo = 0.0;
  double hi = 2.0 * report.lambda * handle->outer_radius();
  std::vector<Eigen::VectorXd> best;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    std::vector<Eigen::VectorXd> kept = Greedy(*pool, mid);
    if (static_cast<double>(kept.size()) > report.required_size) {
      lo = mid;
      best = std::move(kept);
    } else {
      hi = mid;
    }
  }
  if (best.empty()) return report;
  report.rho = lo;
  report.packing_size = static_cast<std::int64_t>(best.size());
  report.lower_bound = lo / 4.0;

  GaugeSolver gauge(handle->matrix());
  const int used = std::min<int>(cfg.max_points, best.size());
  for (int i = 0; i < used; ++i) {
    absl::StatusOr<double> norm = gauge.Norm(best[i]);
    if (!norm.ok()) return norm.status();
    const Database x = gauge.Preimage();
    double total = 0.0;
    for (std::int64_t t = 0; t < cfg.trials_per_point; ++t) {
      absl::StatusOr<Eigen::VectorXd> a = target.release(x, rng);
      if (!a.ok()) return a.status();
      total += (*a - best[i]).norm();
    }
    report.measured_error =
        std::max(report.measured_error, total / cfg.trials_per_point);
  }
  report.verdict = report.measured_error >= report.lower_bound
                       ? Verdict::kPass
                       : Verdict::kFail;
  return report;
}

namespace {

absl::StatusOr<std::vector<Eigen::VectorXd>> ParseVectors(
    const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("instance needs an array '", key, "'"));
  }
  std::vector<Eigen::VectorXd> out;
  for (const nlohmann::json& row : j[key]) {
    if (row.is_number()) {
      out.push_back(Eigen::VectorXd::Constant(1, row.get<double>()));
      continue;
    }
    if (!row.is_array() || row.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", key, "' entries must be numbers or arrays"));
    }
    Eigen::VectorXd v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("non-numeric value in '", key, "'"));
      }
      v(i) = row[i].get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

double InstanceDistance(const TinyInstance& inst, int i, int j) {
  if (inst.distances.size() > 0) return inst.distances(i, j);
  return (inst.databases[i] - inst.databases[j]).lpNorm<1>();
}

double Err(const TinyInstance& inst, int x, int a) {
  return (inst.answers[a] - inst.query_values[x]).norm();
}

}  // namespace

absl::StatusOr<TinyInstance> TinyInstanceFromJson(const nlohmann::json& j) {
  TinyInstance inst;
  absl::StatusOr<std::vector<Eigen::VectorXd>> dbs =
      ParseVectors(j, "databases");
  if (!dbs.ok()) return dbs.status();
  absl::StatusOr<std::vector<Eigen::VectorXd>> values =
      ParseVectors(j, "query_values");
  if (!values.ok()) return values.status();
  absl::StatusOr<std::vector<Eigen::VectorXd>> answers =
      ParseVectors(j, "answers");
  if (!answers.ok()) return answers.status();
  inst.databases = *std::move(dbs);
  inst.query_values = *std::move(values);
  inst.answers = *std::move(answers);
  if (inst.databases.empty() || inst.answers.empty()) {
    return absl::InvalidArgumentError("instance needs databases and answers");
  }
  if (inst.query_values.size() != inst.databases.size()) {
    return absl::InvalidArgumentError(
        "query_values must have one entry per database");
  }
  const auto dim = inst.query_values.front().size();
  for (const auto& v : inst.query_values) {
    if (v.size() != dim) {
      return absl::InvalidArgumentError("query values differ in dimension");
    }
  }
  for (const auto& a : inst.answers) {
    if (a.size() != dim) {
      return absl::InvalidArgumentError(
          "answers must match the query value dimension");
    }
  }
  if (j.contains("distances")) {
    absl::StatusOr<std::vector<Eigen::VectorXd>> rows =
        ParseVectors(j, "distances");
    if (!rows.ok()) return rows.status();
    const int m = static_cast<int>(inst.databases.size());
    if (static_cast<int>(rows->size()) != m) {
      return absl::InvalidArgumentError("distances must be |D| x |D|");
    }
    inst.distances.resize(m, m);
    for (int i = 0; i < m; ++i) {
      if ((*rows)[i].size() != m) {
        return absl::InvalidArgumentError("distances must be |D| x |D|");
      }
      inst.distances.row(i) = (*rows)[i].transpose();
    }
  }
  return inst;
}

absl::StatusOr<LpReport> LpOptimalError(const TinyInstance& inst, double eps,
                                        int max_variables) {
  if (!(eps > 0.0)) return absl::InvalidArgumentError("epsilon must be > 0");
  const int nd = static_cast<int>(inst.databases.size());
  const int na = static_cast<int>(inst.answers.size());
  if (nd < 1 || na < 1 ||
      static_cast<int>(inst.query_values.size()) != nd) {
    return absl::InvalidArgumentError("malformed instance");
  }
  const long long vars = static_cast<long long>(nd) * na + 1;
  if (vars > max_variables) {
    return absl::InvalidArgumentError(absl::StrCat(
        "instance has ", vars, " LP variables, cap is ", max_variables));
  }
  // Variable layout: mu(x, a) at x * na + a, then t.
  const int n = static_cast<int>(vars);
  const int t_col = n - 1;
  std::vector<Eigen::VectorXd> ub_rows;
  std::vector<double> ub_rhs;
  for (int x = 0; x < nd; ++x) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < na; ++a) row(x * na + a) = Err(inst, x, a);
    row(t_col) = -1.0;
    ub_rows.push_back(std::move(row));
    ub_rhs.push_back(0.0);
  }
  for (int x = 0; x < nd; ++x) {
    for (int y = 0; y < nd; ++y) {
      if (x == y) continue;
      const double factor = std::exp(eps * InstanceDistance(inst, x, y));
      // Infinite factors make the constraint vacuous.
      if (!std::isfinite(factor)) continue;
      for (int a = 0; a < na; ++a) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        row(x * na + a) = 1.0;
        row(y * na + a) = -factor;
        ub_rows.push_back(std::move(row));
        ub_rhs.push_back(0.0);
      }
    }
  }
  LpProblem p;
  p.c = Eigen::VectorXd::Zero(n);
  p.c(t_col) = 1.0;
  p.a_ub.resize(ub_rows.size(), n);
  p.b_ub.resize(ub_rows.size());
  for (std::size_t i = 0; i < ub_rows.size(); ++i) {
    p.a_ub.row(i) = ub_rows[i].transpose();
    p.b_ub(i) = ub_rhs[i];
  }
  p.a_eq = Eigen::MatrixXd::Zero(nd, n);
  p.b_eq = Eigen::VectorXd::Ones(nd);
  for (int x = 0; x < nd; ++x) p.a_eq.block(x, x * na, 1, na).setOnes();

  absl::StatusOr<LpSolution> sol = SolveLp(p);
  if (!sol.ok()) return sol.status();
  LpReport report;
  report.variables = n;
  report.pivots = sol->pivots;
  report.mu.resize(nd, na);
  for (int x = 0; x < nd; ++x) {
    for (int a = 0; a < na; ++a) report.mu(x, a) = sol->x(x * na + a);
  }
  // The optimum is the worst-case error of the table; t itself may sit
  // above it when no error row binds.
  report.optimum = WorstCaseExpectedError(inst, report.mu);
  return report;
}

nlohmann::json LpReportToJson(const LpReport& report) {
  nlohmann::json mu = nlohmann::json::array();
  for (Eigen::Index x = 0; x < report.mu.rows(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index a = 0; a < report.mu.cols(); ++a) {
      row.push_back(report.mu(x, a));
    }
    mu.push_back(row);
  }
  return {{"optimum", report.optimum},
          {"variables", report.variables},
          {"pivots", report.pivots},
          {"mu", mu}};
}

double WorstCaseExpectedError(const TinyInstance& inst,
                              const Eigen::MatrixXd& mu) {
  double worst = 0.0;
  for (Eigen::Index x = 0; x < mu.rows(); ++x) {
    double e = 0.0;
    for (Eigen::Index a = 0; a < mu.cols(); ++a) {
      e += mu(x, a) * Err(inst, static_cast<int>(x), static_cast<int>(a));
    }
    worst = std::max(worst, e);
  }
  return worst;
}

Eigen::MatrixXd ExponentialMechanismTable(
    const TinyInstance& inst, double eps,
    const std::function<double(int x, int a)>& score) {
  const int nd = static_cast<int>(inst.databases.size());
  const int na = static_cast<int>(inst.answers.size());
  Eigen::MatrixXd mu(nd, na);
  for (int x = 0; x < nd; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < na; ++a) best = std::min(best, score(x, a));
    for (int a = 0; a < na; ++a) {
      mu(x, a) = std::exp(-eps * (score(x, a) - best));
    }
    mu.row(x) /= mu.row(x).sum();
  }
  return mu;
}

}  // namespace knorm
