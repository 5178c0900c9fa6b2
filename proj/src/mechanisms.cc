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

#include "knorm/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "knorm/covariance.h"
#include "knorm/polytope.h"

namespace knorm {
namespace {

// Child stream used to build samplers and plans, so that a mechanism's
// setup does not shift the noise draws of its first release.
constexpr std::uint64_t kSetupStream = 0x9d2c5680;

absl::Status CheckEpsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", eps));
  }
  return absl::OkStatus();
}

class LaplaceImpl : public Mechanism {
 public:
  LaplaceImpl(QueryMatrix f, PrivacyParams p)
      : Mechanism(MechanismKind::kLaplace, std::move(f), p),
        scale_(query().sensitivity() / p.epsilon) {}

  absl::StatusOr<NoiseSample> Release(const Database& x,
                                      RngStream& rng) override {
    absl::StatusOr<Eigen::VectorXd> truth = TrueAnswer(x);
    if (!truth.ok()) return truth.status();
    NoiseSample out;
    out.kind = kind();
    out.answer = *std::move(truth);
    for (Eigen::Index i = 0; i < out.answer.size(); ++i) {
      out.answer(i) += LaplaceUnchecked(scale_, rng);
    }
    return out;
  }

 private:
  double scale_;
};

class GaussianImpl : public Mechanism {
 public:
  GaussianImpl(QueryMatrix f, PrivacyParams p, double sigma)
      : Mechanism(MechanismKind::kGaussian, std::move(f), p), sigma_(sigma) {}

  absl::StatusOr<NoiseSample> Release(const Database& x,
                                      RngStream& rng) override {
    absl::StatusOr<Eigen::VectorXd> truth = TrueAnswer(x);
    if (!truth.ok()) return truth.status();
    NoiseSample out;
    out.kind = kind();
    out.answer = *std::move(truth);
    for (Eigen::Index i = 0; i < out.answer.size(); ++i) {
      out.answer(i) += sigma_ * StandardNormal(rng);
    }
    return out;
  }

 private:
  double sigma_;
};

class KNormImpl : public Mechanism {
 public:
  KNormImpl(QueryMatrix f, PrivacyParams p, MechanismOptions options,
            PolytopeHandle handle)
      : Mechanism(MechanismKind::kKNorm, std::move(f), p),
        options_(std::move(options)),
        handle_(std::move(handle)) {}

  absl::StatusOr<NoiseSample> Release(const Database& x,
                                      RngStream& rng) override {
    absl::StatusOr<std::vector<NoiseSample>> one = ReleaseMany(x, 1, rng);
    if (!one.ok()) return one.status();
    return std::move(one->front());
  }

  absl::StatusOr<std::vector<NoiseSample>> ReleaseMany(
      const Database& x, std::int64_t count, RngStream& rng) override {
    absl::StatusOr<Eigen::VectorXd> truth = TrueAnswer(x);
    if (!truth.ok()) return truth.status();
    if (absl::Status s = EnsureSampler(rng); !s.ok()) return s;
    absl::StatusOr<std::vector<Eigen::VectorXd>> points =
        count == 1 ? DrawOne(rng) : sampler_->DrawMany(count, rng);
    if (!points.ok()) return points.status();
    const double shape = query().d() + 1.0;
    const double scale = 1.0 / privacy().epsilon;
    std::vector<NoiseSample> out;
    out.reserve(count);
    for (Eigen::VectorXd& z : *points) {
      NoiseSample s;
      s.kind = kind();
      s.r = GammaUnchecked(shape, scale, rng);
      s.answer = *truth + s.r * z;
      s.z = std::move(z);
      s.inflated = handle_.inflate();
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  absl::StatusOr<std::vector<Eigen::VectorXd>> DrawOne(RngStream& rng) {
    absl::StatusOr<Eigen::VectorXd> z = sampler_->Draw(rng);
    if (!z.ok()) return z.status();
    return std::vector<Eigen::VectorXd>{*std::move(z)};
  }

  absl::Status EnsureSampler(const RngStream& rng) {
    if (sampler_ != nullptr) return absl::OkStatus();
    RngStream setup = rng.Split(kSetupStream);
    absl::StatusOr<std::unique_ptr<PointSampler>> sampler =
        MakeSampler(handle_, options_.sampler, options_.walk, setup);
    if (!sampler.ok()) return sampler.status();
    sampler_ = *std::move(sampler);
    return absl::OkStatus();
  }

  MechanismOptions options_;
  PolytopeHandle handle_;
  std::unique_ptr<PointSampler> sampler_;
};

class KNormMcmcImpl : public Mechanism {
 public:
  KNormMcmcImpl(QueryMatrix f, PrivacyParams p, MechanismOptions options,
                PolytopeHandle handle)
      : Mechanism(MechanismKind::kKNormMcmc, std::move(f), p),
        options_(std::move(options)),
        handle_(handle),
        walker_(handle, options_.walk) {}

  absl::StatusOr<NoiseSample> Release(const Database& x,
                                      RngStream& rng) override {
    absl::StatusOr<Eigen::VectorXd> truth = TrueAnswer(x);
    if (!truth.ok()) return truth.status();
    const int d = query().d();
    const double eps = privacy().epsilon;
    NoiseSample out;
    out.kind = kind();
    out.r = GammaUnchecked(d + 1.0, 1.0 / eps, rng);
    out.beta = std::min(eps / d, 1.0 / out.r);
    const std::int64_t steps =
        options_.walk.steps >= 0
            ? options_.walk.steps
            : static_cast<std::int64_t>(
                  std::ceil(50.0 * d * d / (out.beta * out.beta)));
    absl::StatusOr<WalkResult> walk = walker_.Walk(rng, out.beta, steps);
    if (!walk.ok()) return walk.status();
    out.z = std::move(walk->point);
    out.answer = *truth + out.r * out.z;
    out.inflated = handle_.inflate();
    return out;
  }

 private:
  MechanismOptions options_;
  PolytopeHandle handle_;
  GridWalkSampler walker_;
};

class NimImpl : public Mechanism {
 public:
  NimImpl(QueryMatrix f, PrivacyParams p, MechanismOptions options)
      : Mechanism(MechanismKind::kNim, std::move(f), p),
        options_(std::move(options)) {}

  absl::StatusOr<NoiseSample> Release(const Database& x,
                                      RngStream& rng) override {
    absl::StatusOr<std::vector<NoiseSample>> one = ReleaseMany(x, 1, rng);
    if (!one.ok()) return one.status();
    return std::move(one->front());
  }

  absl::StatusOr<std::vector<NoiseSample>> ReleaseMany(
      const Database& x, std::int64_t count, RngStream& rng) override {
    absl::StatusOr<Eigen::VectorXd> truth = TrueAnswer(x);
    if (!truth.ok()) return truth.status();
    if (absl::Status s = EnsurePlan(rng); !s.ok()) return s;
    const double level_eps =
        privacy().epsilon / static_cast<double>(levels_.size());

    std::vector<NoiseSample> out(count);
    for (NoiseSample& s : out) {
      s.kind = kind();
      s.answer = Eigen::VectorXd::Zero(query().d());
    }
    for (Level& level : levels_) {
      // a_m = F_m x + r z lives in level coordinates.
      const Eigen::VectorXd level_truth = level.f.entries() * x;
      absl::StatusOr<std::vector<Eigen::VectorXd>> points =
          count == 1 ? DrawOne(*level.sampler, rng)
                     : level.sampler->DrawMany(count, rng);
      if (!points.ok()) return points.status();
      for (std::int64_t t = 0; t < count; ++t) {
        NimLevelTrace trace;
        trace.dim = level.f.d();
        trace.emitted_dim = level.emitted_dim;
        trace.epsilon = level_eps;
        trace.r = GammaUnchecked(trace.dim + 1.0, 1.0 / level_eps, rng);
        trace.sampler = level.sampler->name();
        const Eigen::VectorXd a_m = level_truth + trace.r * (*points)[t];
        trace.emitted = level.emit * a_m;
        out[t].answer += trace.emitted;
        out[t].inflated = out[t].inflated || level.inflated;
        out[t].levels.push_back(std::move(trace));
      }
    }
    return out;
  }

 private:
  struct Level {
    QueryMatrix f;
    // d x d_m: maps level coordinates to the emitted part P_V in original
    // coordinates.
    Eigen::MatrixXd emit;
    int emitted_dim = 0;
    bool inflated = false;
    std::unique_ptr<PointSampler> sampler;
  };

  static absl::StatusOr<std::vector<Eigen::VectorXd>> DrawOne(
      PointSampler& sampler, RngStream& rng) {
    absl::StatusOr<Eigen::VectorXd> z = sampler.Draw(rng);
    if (!z.ok()) return z.status();
    return std::vector<Eigen::VectorXd>{*std::move(z)};
  }

  absl::Status EnsurePlan(const RngStream& rng) {
    if (!levels_.empty()) return absl::OkStatus();
    RngStream setup = rng.Split(kSetupStream);
    QueryMatrix current = query();
    // Columns map level coordinates into the original space.
    Eigen::MatrixXd lift = Eigen::MatrixXd::Identity(query().d(), query().d());
    std::vector<Level> levels;
    while (true) {
      const int dm = current.d();
      PolytopeOptions popts;
      popts.inflate = options_.inflate;
      absl::StatusOr<PolytopeHandle> handle =
          PolytopeHandle::Create(current, popts);
      if (!handle.ok()) return handle.status();
      absl::StatusOr<std::unique_ptr<PointSampler>> sampler =
          MakeSampler(*handle, options_.sampler, options_.walk, setup);
      if (!sampler.ok()) return sampler.status();

      Level level{current, Eigen::MatrixXd(), 0, options_.inflate,
                  *std::move(sampler)};
      if (dm == 1) {
        level.emit = lift;
        level.emitted_dim = 1;
        levels.push_back(std::move(level));
        break;
      }
      const std::int64_t samples = options_.covariance_samples > 0
                                       ? options_.covariance_samples
                                       : DefaultCovarianceSamples(dm);
      absl::StatusOr<CovarianceSummary> cov =
          EstimateCovariance(*handle, samples, *level.sampler, setup);
      if (!cov.ok()) return cov.status();
      const int top = dm / 2;
      const Eigen::MatrixXd u = cov->basis.leftCols(top);
      const Eigen::MatrixXd v = cov->basis.rightCols(dm - top);
      level.emit = lift * v * v.transpose();
      level.emitted_dim = dm - top;
      levels.push_back(std::move(level));

      absl::StatusOr<QueryMatrix> next = ProjectQuery(current, u);
      if (!next.ok()) return next.status();
      current = *std::move(next);
      lift = lift * u;
    }
    levels_ = std::move(levels);
    return absl::OkStatus();
  }

  MechanismOptions options_;
  std::vector<Level> levels_;
};

}  // namespace

absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name) {
  if (name == "laplace") return MechanismKind::kLaplace;
  if (name == "gaussian") return MechanismKind::kGaussian;
  if (name == "knorm") return MechanismKind::kKNorm;
  if (name == "knorm-mcmc") return MechanismKind::kKNormMcmc;
  if (name == "nim") return MechanismKind::kNim;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mechanism '", std::string(name),
      "'; expected laplace, gaussian, knorm, knorm-mcmc or nim"));
}

const char* MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kGaussian:
      return "gaussian";
    case MechanismKind::kKNorm:
      return "knorm";
    case MechanismKind::kKNormMcmc:
      return "knorm-mcmc";
    case MechanismKind::kNim:
      return "nim";
  }
  return "unknown";
}

int NimLevelCount(int d) {
  int levels = 1;
  while (d > 1) {
    d /= 2;
    ++levels;
  }
  return levels;
}

absl::StatusOr<std::vector<NoiseSample>> Mechanism::ReleaseMany(
    const Database& x, std::int64_t count, RngStream& rng) {
  if (count < 1) return absl::InvalidArgumentError("count must be positive");
  std::vector<NoiseSample> out;
  out.reserve(count);
  for (std::int64_t i = 0; i < count; ++i) {
    absl::StatusOr<NoiseSample> s = Release(x, rng);
    if (!s.ok()) return s.status();
    out.push_back(*std::move(s));
  }
  return out;
}

absl::StatusOr<Eigen::VectorXd> Mechanism::TrueAnswer(const Database& x) const {
  return Evaluate(query_, x);
}

absl::StatusOr<double> GaussianSigma(double sensitivity, double eps,
                                     double delta) {
  if (absl::Status s = CheckEpsilon(eps); !s.ok()) return s;
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the Gaussian mechanism needs 0 < delta < 1, got ", delta));
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

absl::StatusOr<std::unique_ptr<Mechanism>> MakeMechanism(
    MechanismKind kind, const QueryMatrix& f, PrivacyParams privacy,
    const MechanismOptions& options) {
  if (absl::Status s = CheckEpsilon(privacy.epsilon); !s.ok()) return s;
  if (kind != MechanismKind::kGaussian && privacy.delta != 0.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        MechanismName(kind), " is a pure mechanism; delta must be 0"));
  }
  switch (kind) {
    case MechanismKind::kLaplace:
      return std::unique_ptr<Mechanism>(
          std::make_unique<LaplaceImpl>(f, privacy));
    case MechanismKind::kGaussian: {
      absl::StatusOr<double> sigma =
          GaussianSigma(f.sensitivity(), privacy.epsilon, privacy.delta);
      if (!sigma.ok()) return sigma.status();
      return std::unique_ptr<Mechanism>(
          std::make_unique<GaussianImpl>(f, privacy, *sigma));
    }
    case MechanismKind::kKNorm:
    case MechanismKind::kKNormMcmc: {
      PolytopeOptions popts;
      popts.inflate = options.inflate;
      absl::StatusOr<PolytopeHandle> handle = PolytopeHandle::Create(f, popts);
      if (!handle.ok()) return handle.status();
      if (kind == MechanismKind::kKNorm) {
        return std::unique_ptr<Mechanism>(
            std::make_unique<KNormImpl>(f, privacy, options, *handle));
      }
      return std::unique_ptr<Mechanism>(
          std::make_unique<KNormMcmcImpl>(f, privacy, options, *handle));
    }
    case MechanismKind::kNim:
      return std::unique_ptr<Mechanism>(
          std::make_unique<NimImpl>(f, privacy, options));
  }
  return absl::InvalidArgumentError("unknown mechanism");
}

absl::StatusOr<NoiseSample> LaplaceMechanism(const QueryMatrix& f,
                                             const Database& x, double eps,
                                             RngStream& rng) {
  absl::StatusOr<std::unique_ptr<Mechanism>> m =
      MakeMechanism(MechanismKind::kLaplace, f, {eps, 0.0});
  if (!m.ok()) return m.status();
  return (*m)->Release(x, rng);
}

absl::StatusOr<NoiseSample> GaussianMechanism(const QueryMatrix& f,
                                              const Database& x, double eps,
                                              double delta, RngStream& rng) {
  absl::StatusOr<std::unique_ptr<Mechanism>> m =
      MakeMechanism(MechanismKind::kGaussian, f, {eps, delta});
  if (!m.ok()) return m.status();
  return (*m)->Release(x, rng);
}

absl::StatusOr<NoiseSample> KNormMechanism(const QueryMatrix& f,
                                           const Database& x, double eps,
                                           SamplerChoice sampler,
                                           RngStream& rng) {
  MechanismOptions options;
  options.sampler = sampler;
  absl::StatusOr<std::unique_ptr<Mechanism>> m =
      MakeMechanism(MechanismKind::kKNorm, f, {eps, 0.0}, options);
  if (!m.ok()) return m.status();
  return (*m)->Release(x, rng);
}

absl::StatusOr<NoiseSample> KNormEfficient(const QueryMatrix& f,
                                           const Database& x, double eps,
                                           RngStream& rng) {
  absl::StatusOr<std::unique_ptr<Mechanism>> m =
      MakeMechanism(MechanismKind::kKNormMcmc, f, {eps, 0.0});
  if (!m.ok()) return m.status();
  return (*m)->Release(x, rng);
}

absl::StatusOr<NoiseSample> NimMechanism(const QueryMatrix& f,
                                         const Database& x, double eps_total,
                                         RngStream& rng) {
  absl::StatusOr<std::unique_ptr<Mechanism>> m =
      MakeMechanism(MechanismKind::kNim, f, {eps_total, 0.0});
  if (!m.ok()) return m.status();
  return (*m)->Release(x, rng);
}

}  // namespace knorm
