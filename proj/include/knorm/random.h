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

#ifndef KNORM_RANDOM_H_
#define KNORM_RANDOM_H_

#include <cstdint>
#include <limits>
#include <random>

#include "absl/status/statusor.h"

namespace knorm {

// A reproducible random stream identified by (seed, stream_id). Equal pairs
// produce bit-identical sequences; distinct stream ids give statistically
// independent sequences, so parallel work splits by stream id.
//
// Not thread-safe: each stream has a single owner.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() {
    return std::numeric_limits<result_type>::min();
  }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform();
  // Uniform on (0, 1); safe to pass to log().
  double UniformOpen();
  // Uniform integer in [0, bound).
  std::uint64_t UniformInt(std::uint64_t bound);

  // A child stream sharing this seed, keyed by (stream_id, child).
  RngStream Split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Gamma(k, theta) with density r^{k-1} e^{-r/theta} / (Gamma(k) theta^k).
struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
};

// Marsaglia-Tsang squeeze/rejection for shape >= 1; shape < 1 is boosted
// through Gamma(k + 1) * U^{1/k}.
absl::StatusOr<double> SampleGamma(const GammaParams& params, RngStream& rng);

// Density (1 / 2b) exp(-|t| / b).
absl::StatusOr<double> SampleLaplace(double scale, RngStream& rng);

// Mean-zero normal with standard deviation sigma.
absl::StatusOr<double> SampleGaussian(double sigma, RngStream& rng);

// Unchecked variants for hot loops whose parameters are validated upstream.
double GammaUnchecked(double shape, double scale, RngStream& rng);
double LaplaceUnchecked(double scale, RngStream& rng);
double StandardNormal(RngStream& rng);

}  // namespace knorm

#endif  // KNORM_RANDOM_H_
