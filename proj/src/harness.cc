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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <type_traits>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "knorm/bounds.h"
#include "knorm/covariance.h"
#include "knorm/mechanisms.h"
#include "knorm/query_model.h"
#include "knorm/random.h"

namespace knorm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Stream ids below this are cells; bounds use ids above it.
constexpr std::uint64_t kBoundStreamBase = 1ULL << 32;
constexpr std::uint64_t kQueryStreamBase = 1ULL << 33;

template <typename T>
absl::Status ParseNumber(absl::string_view key, absl::string_view text,
                         T& out) {
  bool ok = false;
  if constexpr (std::is_same_v<T, double>) {
    ok = absl::SimpleAtod(text, &out);
  } else {
    ok = absl::SimpleAtoi(text, &out);
  }
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "' has bad value '", text, "'"));
  }
  return absl::OkStatus();
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  return absl::StrFormat("%.10g", v);
}

struct CellBounds {
  double vol_lb = kNaN;
  double gvol_lb = kNaN;
};

CellBounds ComputeBounds(const QueryMatrix& f, const ExperimentConfig& cfg,
                         std::uint64_t stream) {
  CellBounds out;
  if (cfg.bound_trials <= 0 || f.d() > kDefaultVolumeDimCap) return out;
  RngStream rng(cfg.seed, stream);
  absl::StatusOr<PolytopeHandle> handle = PolytopeHandle::Create(f);
  if (!handle.ok()) return out;
  absl::StatusOr<std::unique_ptr<PointSampler>> sampler =
      MakeSampler(*handle, SamplerChoice::kAuto, {}, rng);
  if (!sampler.ok()) return out;
  absl::StatusOr<CovarianceSummary> cov = EstimateCovariance(
      *handle, DefaultCovarianceSamples(f.d()), **sampler, rng);
  if (!cov.ok()) return out;
  absl::StatusOr<BoundReport> report =
      GVolLb(f, cfg.eps, *cov, rng, cfg.bound_trials);
  if (!report.ok()) return out;
  out.vol_lb = report->vol_lb;
  out.gvol_lb = report->gvol_lb;
  return out;
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_no, " is not key=value"));
    }
    const std::string key(absl::StripAsciiWhitespace(view.substr(0, eq)));
    const std::string value(absl::StripAsciiWhitespace(view.substr(eq + 1)));
    if (!seen.insert(key).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("config key '", key, "' appears twice"));
    }
    absl::Status s;
    if (key == "dims") {
      for (absl::string_view part : absl::StrSplit(value, ',')) {
        int d = 0;
        s = ParseNumber(key, absl::StripAsciiWhitespace(part), d);
        if (!s.ok()) break;
        cfg.dims.push_back(d);
      }
    } else if (key == "n") {
      s = ParseNumber(key, value, cfg.n);
    } else if (key == "eps") {
      s = ParseNumber(key, value, cfg.eps);
    } else if (key == "delta") {
      s = ParseNumber(key, value, cfg.delta);
    } else if (key == "mechanisms") {
      for (absl::string_view part : absl::StrSplit(value, ',')) {
        cfg.mechanisms.emplace_back(absl::StripAsciiWhitespace(part));
      }
    } else if (key == "trials") {
      s = ParseNumber(key, value, cfg.trials);
    } else if (key == "seed") {
      s = ParseNumber(key, value, cfg.seed);
    } else if (key == "sampler") {
      absl::StatusOr<SamplerChoice> choice = ParseSamplerChoice(value);
      if (choice.ok()) cfg.sampler = *choice;
      s = choice.status();
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "walk_beta") {
      s = ParseNumber(key, value, cfg.walk_beta);
    } else if (key == "walk_steps") {
      s = ParseNumber(key, value, cfg.walk_steps);
    } else if (key == "walk_burn_in") {
      s = ParseNumber(key, value, cfg.walk_burn_in);
    } else if (key == "walk_thin") {
      s = ParseNumber(key, value, cfg.walk_thin);
    } else if (key == "database") {
      cfg.database = value;
    } else if (key == "bound_trials") {
      s = ParseNumber(key, value, cfg.bound_trials);
    } else {
      s = absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
    if (!s.ok()) return s;
  }
  if (absl::Status s = ValidateExperimentConfig(cfg); !s.ok()) return s;
  return cfg;
}

absl::StatusOr<ExperimentConfig> ReadExperimentConfigFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseExperimentConfig(in);
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) {
    return absl::InvalidArgumentError("trials must be at least 1");
  }
  if (cfg.dims.empty()) return absl::InvalidArgumentError("dims is empty");
  for (int d : cfg.dims) {
    if (d < 1 || d > cfg.n) {
      return absl::InvalidArgumentError(
          absl::StrCat("every d must satisfy 1 <= d <= n; got d=", d,
                       " n=", cfg.n));
    }
  }
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) {
    return absl::InvalidArgumentError("eps must be positive");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (cfg.mechanisms.empty()) {
    return absl::InvalidArgumentError("mechanisms is empty");
  }
  for (const std::string& m : cfg.mechanisms) {
    if (absl::Status s = ParseMechanismKind(m).status(); !s.ok()) return s;
  }
  if (cfg.walk_beta < 0.0 || cfg.walk_steps < 0 || cfg.walk_burn_in < 0 ||
      cfg.walk_thin < 0 || cfg.bound_trials < 0) {
    return absl::InvalidArgumentError("walk and bound settings must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<ResultRow>> RunExperiment(
    const ExperimentConfig& cfg) {
  if (absl::Status s = ValidateExperimentConfig(cfg); !s.ok()) return s;
  Database x = Database::Zero(cfg.n);
  if (!cfg.database.empty()) {
    absl::StatusOr<Database> loaded = ReadDatabaseFile(cfg.database);
    if (!loaded.ok()) return loaded.status();
    if (loaded->size() != cfg.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "database has ", loaded->size(), " entries, config n=", cfg.n));
    }
    x = *std::move(loaded);
  }

  MechanismOptions options;
  options.sampler = cfg.sampler;
  if (cfg.walk_beta > 0.0) options.walk.beta = cfg.walk_beta;
  if (cfg.walk_steps > 0) options.walk.steps = cfg.walk_steps;
  if (cfg.walk_burn_in > 0) options.walk.burn_in = cfg.walk_burn_in;
  if (cfg.walk_thin > 0) options.walk.thin = cfg.walk_thin;

  std::vector<ResultRow> rows;
  std::uint64_t cell = 0;
  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const int d = cfg.dims[di];
    RngStream query_rng(cfg.seed, kQueryStreamBase + di);
    absl::StatusOr<QueryMatrix> f = RandomBernoulliQuery(d, cfg.n, query_rng);
    if (!f.ok()) return f.status();
    const CellBounds bounds = ComputeBounds(*f, cfg, kBoundStreamBase + di);
    absl::StatusOr<TheoryCurves> curves =
        ComputeTheoryCurves(d, cfg.n, cfg.eps, cfg.delta);
    absl::StatusOr<Eigen::VectorXd> truth = Evaluate(*f, x);
    if (!truth.ok()) return truth.status();

    for (const std::string& name : cfg.mechanisms) {
      ResultRow row;
      row.d = d;
      row.n = cfg.n;
      row.eps = cfg.eps;
      row.mechanism = name;
      row.trials = cfg.trials;
      row.seed = cfg.seed;
      row.vol_lb = bounds.vol_lb;
      row.gvol_lb = bounds.gvol_lb;
      row.knorm_ref = curves.ok() ? curves->knorm_ref : kNaN;
      row.laplace_ref = curves.ok() ? curves->laplace_ref : kNaN;
      const auto start = std::chrono::steady_clock::now();

      RngStream rng(cfg.seed, cell++);
      const MechanismKind kind = *ParseMechanismKind(name);
      PrivacyParams privacy{cfg.eps,
                            kind == MechanismKind::kGaussian ? cfg.delta : 0.0};
      absl::StatusOr<std::unique_ptr<Mechanism>> mech =
          MakeMechanism(kind, *f, privacy, options);
      absl::StatusOr<std::vector<NoiseSample>> samples =
          mech.ok() ? (*mech)->ReleaseMany(x, cfg.trials, rng)
                    : absl::StatusOr<std::vector<NoiseSample>>(mech.status());
      if (!samples.ok()) {
        row.error = std::string(samples.status().message());
        row.mean_error = kNaN;
        row.std_error = kNaN;
      } else {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const NoiseSample& s : *samples) {
          const double e = (s.answer - *truth).norm();
          sum += e;
          sum_sq += e * e;
        }
        const double count = static_cast<double>(samples->size());
        row.mean_error = sum / count;
        row.std_error = count > 1
                            ? std::sqrt(std::max(
                                  0.0, (sum_sq - sum * sum / count) /
                                           (count - 1)))
                            : 0.0;
      }
      row.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      rows.push_back(std::move(row));
    }
  }

  if (!cfg.output.empty()) {
    std::ofstream csv(cfg.output);
    if (!csv) {
      return absl::UnavailableError(
          absl::StrCat("cannot write ", cfg.output));
    }
    WriteResultsCsv(rows, csv);
    std::ofstream json(cfg.output + ".json");
    if (!json) {
      return absl::UnavailableError(
          absl::StrCat("cannot write ", cfg.output, ".json"));
    }
    json << ResultsToJson(rows).dump(2) << '\n';
  }
  return rows;
}

void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "d,n,eps,mechanism,trials,mean_error,std_error,vol_lb,gvol_lb,"
         "knorm_ref,laplace_ref,seed,error\n";
  for (const ResultRow& r : rows) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.d << ',' << r.n << ',' << FormatNumber(r.eps) << ','
        << r.mechanism << ',' << r.trials << ',' << FormatNumber(r.mean_error)
        << ',' << FormatNumber(r.std_error) << ',' << FormatNumber(r.vol_lb)
        << ',' << FormatNumber(r.gvol_lb) << ',' << FormatNumber(r.knorm_ref)
        << ',' << FormatNumber(r.laplace_ref) << ',' << r.seed << ','
        << error << '\n';
  }
}

nlohmann::json ResultsToJson(const std::vector<ResultRow>& rows) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::json out = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    out.push_back({{"d", r.d},
                   {"n", r.n},
                   {"eps", r.eps},
                   {"mechanism", r.mechanism},
                   {"trials", r.trials},
                   {"mean_error", num(r.mean_error)},
                   {"std_error", num(r.std_error)},
                   {"vol_lb", num(r.vol_lb)},
                   {"gvol_lb", num(r.gvol_lb)},
                   {"knorm_ref", num(r.knorm_ref)},
                   {"laplace_ref", num(r.laplace_ref)},
                   {"wall_seconds", r.wall_seconds},
                   {"seed", r.seed},
                   {"error", r.error}});
  }
  return out;
}

absl::StatusOr<TrendReport> CompareToTheory(
    const std::vector<ResultRow>& rows) {
  std::map<int, double> knorm;
  std::map<int, double> laplace;
  for (const ResultRow& r : rows) {
    if (!r.error.empty() || !(r.knorm_ref > 0.0)) continue;
    const double ratio = r.mean_error / r.knorm_ref;
    if (r.mechanism == "knorm") knorm[r.d] = ratio;
    if (r.mechanism == "laplace") laplace[r.d] = ratio;
  }
  TrendReport report;
  for (const auto& [d, ratio] : knorm) {
    auto it = laplace.find(d);
    if (it == laplace.end()) continue;
    report.dims.push_back(d);
    report.knorm_ratio.push_back(ratio);
    report.laplace_ratio.push_back(it->second);
  }
  if (report.dims.size() < 3) {
    return absl::InvalidArgumentError(
        "trend comparison needs knorm and laplace rows for >= 3 values of d");
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  report.knorm_spread = spread(report.knorm_ratio);
  report.laplace_spread = spread(report.laplace_ratio);
  report.laplace_increasing = true;
  for (std::size_t i = 1; i < report.laplace_ratio.size(); ++i) {
    if (!(report.laplace_ratio[i] > report.laplace_ratio[i - 1])) {
      report.laplace_increasing = false;
    }
  }
  report.pass = report.knorm_spread <= 2.5 && report.laplace_increasing;
  return report;
}

nlohmann::json TrendReportToJson(const TrendReport& report) {
  return {{"dims", report.dims},
          {"knorm_ratio", report.knorm_ratio},
          {"laplace_ratio", report.laplace_ratio},
          {"knorm_spread", report.knorm_spread},
          {"laplace_spread", report.laplace_spread},
          {"laplace_increasing", report.laplace_increasing},
          {"verdict", report.pass ? "PASS" : "FAIL"}};
}

}  // namespace knorm
