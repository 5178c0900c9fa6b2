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

#ifndef KNORM_MECHANISMS_H_
#define KNORM_MECHANISMS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "knorm/query_model.h"
#include "knorm/random.h"
#include "knorm/samplers.h"

namespace knorm {

struct PrivacyParams {
  double epsilon = 1.0;
  // Only the Gaussian mechanism uses delta; pure mechanisms require 0.
  double delta = 0.0;
};

enum class MechanismKind { kLaplace, kGaussian, kKNorm, kKNormMcmc, kNim };

// "laplace" | "gaussian" | "knorm" | "knorm-mcmc" | "nim".
absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name);
const char* MechanismName(MechanismKind kind);

// One level of the recursive mechanism.
struct NimLevelTrace {
  int dim = 0;
  // Dimension of the emitted complement V.
  int emitted_dim = 0;
  double epsilon = 0.0;
  double r = 0.0;
  // P_V a for this level, in the original coordinates.
  Eigen::VectorXd emitted;
  std::string sampler;
};

struct NoiseSample {
  Eigen::VectorXd answer;
  MechanismKind kind = MechanismKind::kLaplace;
  // K-norm variants: answer = Fx + r z.
  double r = 0.0;
  Eigen::VectorXd z;
  // knorm-mcmc: the grid spacing used for this draw.
  double beta = 0.0;
  // The body was K + B_2^d; the noise level grows by at most r.
  bool inflated = false;
  std::vector<NimLevelTrace> levels;
};

struct MechanismOptions {
  SamplerChoice sampler = SamplerChoice::kAuto;
  GridWalkConfig walk;
  bool inflate = false;
  // Covariance draws per recursive level; 0 means max(1000, d^4).
  std::int64_t covariance_samples = 0;
};

// A mechanism bound to one query matrix and privacy budget. Samplers and the
// recursive plan are built on first use and reused, since they depend only
// on F. Not thread-safe.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual absl::StatusOr<NoiseSample> Release(const Database& x,
                                              RngStream& rng) = 0;

  // `count` releases on the same database. Grid-walk based mechanisms draw
  // their points from one thinned chain, which is much cheaper than `count`
  // independent walks but makes consecutive noise vectors weakly dependent.
  virtual absl::StatusOr<std::vector<NoiseSample>> ReleaseMany(
      const Database& x, std::int64_t count, RngStream& rng);

  MechanismKind kind() const { return kind_; }
  const QueryMatrix& query() const { return query_; }
  const PrivacyParams& privacy() const { return privacy_; }

 protected:
  Mechanism(MechanismKind kind, QueryMatrix query, PrivacyParams privacy)
      : kind_(kind), query_(std::move(query)), privacy_(privacy) {}

  absl::StatusOr<Eigen::VectorXd> TrueAnswer(const Database& x) const;

 private:
  MechanismKind kind_;
  QueryMatrix query_;
  PrivacyParams privacy_;
};

absl::StatusOr<std::unique_ptr<Mechanism>> MakeMechanism(
    MechanismKind kind, const QueryMatrix& f, PrivacyParams privacy,
    const MechanismOptions& options = {});

// Fx + w with w_i i.i.d. Laplace(sensitivity / eps).
absl::StatusOr<NoiseSample> LaplaceMechanism(const QueryMatrix& f,
                                             const Database& x, double eps,
                                             RngStream& rng);

// Fx + g with g_i i.i.d. N(0, sigma^2) and
// sigma = sensitivity * sqrt(2 ln(1.25 / delta)) / eps.
absl::StatusOr<NoiseSample> GaussianMechanism(const QueryMatrix& f,
                                              const Database& x, double eps,
                                              double delta, RngStream& rng);
absl::StatusOr<double> GaussianSigma(double sensitivity, double eps,
                                     double delta);

// Fx + r z with r ~ Gamma(d + 1, 1/eps) and z uniform on K.
absl::StatusOr<NoiseSample> KNormMechanism(const QueryMatrix& f,
                                           const Database& x, double eps,
                                           SamplerChoice sampler,
                                           RngStream& rng);

// As above, but z comes from a grid walk with spacing beta = min(eps/d, 1/r)
// tied to the drawn radius.
absl::StatusOr<NoiseSample> KNormEfficient(const QueryMatrix& f,
                                           const Database& x, double eps,
                                           RngStream& rng);

// Recursive non-isotropic mechanism. Each level estimates the covariance of
// its body, splits at index floor(d/2), releases a K-norm answer, emits its
// projection onto the bottom eigenvectors and recurses on the projection
// onto the top ones. The budget is split evenly over the levels.
absl::StatusOr<NoiseSample> NimMechanism(const QueryMatrix& f,
                                         const Database& x, double eps_total,
                                         RngStream& rng);

// floor(log2 d) + 1: the number of K-norm draws the recursion makes.
int NimLevelCount(int d);

}  // namespace knorm

#endif  // KNORM_MECHANISMS_H_
