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

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "knorm/polytope.h"

namespace knorm {
namespace {

absl::Status CheckEps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", eps));
  }
  return absl::OkStatus();
}

absl::StatusOr<VolumeEstimate> RadiusOf(const QueryMatrix& f, RngStream& rng,
                                        std::int64_t trials) {
  absl::StatusOr<PolytopeHandle> handle = PolytopeHandle::Create(f);
  if (!handle.ok()) return handle.status();
  return EstimateVolumeRadius(*handle, rng, trials);
}

nlohmann::json VolumeToJson(const VolumeEstimate& v) {
  return {{"d", v.d},           {"radius", v.radius},
          {"ci_low", v.ci_low}, {"ci_high", v.ci_high},
          {"hits", v.hits},     {"trials", v.trials},
          {"degenerate", v.degenerate}};
}

}  // namespace

double VolLbFromRadius(int d, double eps, double radius) {
  return d * std::sqrt(static_cast<double>(d)) * radius / eps;
}

absl::StatusOr<VolLbResult> VolLb(const QueryMatrix& f, double eps,
                                  RngStream& rng, std::int64_t trials) {
  if (absl::Status s = CheckEps(eps); !s.ok()) return s;
  absl::StatusOr<VolumeEstimate> volume = RadiusOf(f, rng, trials);
  if (!volume.ok()) return volume.status();
  VolLbResult out;
  out.volume = *volume;
  out.value = VolLbFromRadius(f.d(), eps, volume->radius);
  out.ci_low = VolLbFromRadius(f.d(), eps, volume->ci_low);
  out.ci_high = VolLbFromRadius(f.d(), eps, volume->ci_high);
  return out;
}

absl::StatusOr<BoundReport> GVolLb(const QueryMatrix& f, double eps,
                                   const CovarianceSummary& cov,
                                   RngStream& rng, std::int64_t trials) {
  if (absl::Status s = CheckEps(eps); !s.ok()) return s;
  if (cov.basis.rows() != f.d() || cov.basis.cols() != f.d()) {
    return absl::InvalidArgumentError(
        "covariance summary does not match the query dimension");
  }
  BoundReport report;
  report.eps = eps;
  absl::StatusOr<VolLbResult> full = VolLb(f, eps, rng, trials);
  if (!full.ok()) return full.status();
  report.vol_lb = full->value;
  report.volume = full->volume;
  // The identity is one of the projections, so vol_lb itself is a candidate.
  report.gvol_lb = report.vol_lb;
  report.gvol_k = f.d();

  for (int k = 1; k <= f.d(); ++k) {
    absl::StatusOr<EigenspaceProjection> proj = TopEigenspaceProjection(cov, k);
    if (!proj.ok()) return proj.status();
    absl::StatusOr<QueryMatrix> projected = ProjectQuery(f, proj->basis);
    if (!projected.ok()) return projected.status();
    absl::StatusOr<VolumeEstimate> volume = RadiusOf(*projected, rng, trials);
    if (!volume.ok()) return volume.status();
    ProjectionTerm term;
    term.k = k;
    term.volume = *volume;
    term.value = VolLbFromRadius(k, eps, volume->radius);
    term.ci_low = VolLbFromRadius(k, eps, volume->ci_low);
    term.ci_high = VolLbFromRadius(k, eps, volume->ci_high);
    if (term.value > report.gvol_lb) {
      report.gvol_lb = term.value;
      report.gvol_k = k;
    }
    report.per_k.push_back(term);
  }
  return report;
}

nlohmann::json BoundReportToJson(const BoundReport& report) {
  nlohmann::json per_k = nlohmann::json::array();
  for (const ProjectionTerm& t : report.per_k) {
    per_k.push_back({{"k", t.k},
                     {"value", t.value},
                     {"ci_low", t.ci_low},
                     {"ci_high", t.ci_high},
                     {"volume", VolumeToJson(t.volume)}});
  }
  return {{"eps", report.eps},
          {"vol_lb", report.vol_lb},
          {"gvol_lb", report.gvol_lb},
          {"gvol_k", report.gvol_k},
          {"per_k", per_k},
          {"volume_ci", VolumeToJson(report.volume)},
          {"alpha_assumption", report.alpha_assumption}};
}

absl::StatusOr<TheoryCurves> ComputeTheoryCurves(int d, int n, double eps,
                                                 double delta) {
  if (absl::Status s = CheckEps(eps); !s.ok()) return s;
  if (d < 1 || 2 * d > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "reference curves need 1 <= d <= n/2, got d=", d, " n=", n));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  const double dd = d;
  TheoryCurves out;
  out.laplace_ref = dd * std::sqrt(dd) / eps;
  out.knorm_ref =
      dd * std::min(std::sqrt(dd), std::sqrt(std::log(n / dd))) / eps;
  out.gauss_ref = dd * std::sqrt(std::log(1.0 / delta)) / eps;
  return out;
}

}  // namespace knorm
