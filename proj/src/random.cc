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

#include "knorm/random.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace knorm {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 SeedEngine(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = SplitMix64(seed);
  const std::uint64_t b = SplitMix64(a ^ SplitMix64(stream_id + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(SeedEngine(seed, stream_id)) {}

double RngStream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::UniformOpen() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RngStream::UniformInt(std::uint64_t bound) {
  // Lemire's nearly divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream RngStream::Split(std::uint64_t child) const {
  return RngStream(seed_, SplitMix64(stream_id_ * 0x2545f4914f6cdd1dULL +
                                     SplitMix64(child)));
}

double StandardNormal(RngStream& rng) {
  // Marsaglia polar method; the second variate is discarded so the stream
  // carries no hidden state.
  while (true) {
    const double u = 2.0 * rng.Uniform() - 1.0;
    const double v = 2.0 * rng.Uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double GammaUnchecked(double shape, double scale, RngStream& rng) {
  if (shape < 1.0) {
    const double boosted = GammaUnchecked(shape + 1.0, 1.0, rng);
    return scale * boosted * std::pow(rng.UniformOpen(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = StandardNormal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.UniformOpen();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return scale * d * v;
    }
  }
}

double LaplaceUnchecked(double scale, RngStream& rng) {
  const double u = rng.UniformOpen() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

absl::StatusOr<double> SampleGamma(const GammaParams& params, RngStream& rng) {
  if (!(params.shape > 0.0) || !(params.scale > 0.0) ||
      !std::isfinite(params.shape) || !std::isfinite(params.scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Gamma parameters must be positive, got shape=",
                     params.shape, " scale=", params.scale));
  }
  return GammaUnchecked(params.shape, params.scale, rng);
}

absl::StatusOr<double> SampleLaplace(double scale, RngStream& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive, got ", scale));
  }
  return LaplaceUnchecked(scale, rng);
}

absl::StatusOr<double> SampleGaussian(double sigma, RngStream& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Gaussian sigma must be positive, got ", sigma));
  }
  return sigma * StandardNormal(rng);
}

}  // namespace knorm
