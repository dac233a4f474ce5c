// Copyright 2026 The vqaprobe Authors.
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

#ifndef VQAPROBE_PERTURBATION_NOISE_H_
#define VQAPROBE_PERTURBATION_NOISE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "vqaprobe/core/image.h"
#include "vqaprobe/core/random.h"

namespace vqaprobe {

enum class NoiseKind { kGaussian, kPoisson, kSaltPepper, kSpeckle };

// Trial order for image-robustness: trial t uses kNoiseCycle[t % 4].
inline constexpr std::array<NoiseKind, 4> kNoiseCycle = {
    NoiseKind::kGaussian, NoiseKind::kPoisson, NoiseKind::kSaltPepper,
    NoiseKind::kSpeckle};

std::string_view NoiseKindName(NoiseKind kind);
std::optional<NoiseKind> ParseNoiseKind(std::string_view name);

// Pixel values are in normalized [0,1] units.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussian;
  double sigma = 0.05;       // gaussian, speckle
  double amount = 0.05;      // salt & pepper: fraction of altered pixels
  double salt_ratio = 0.5;   // salt & pepper: share of altered pixels set to 1
  double peak = 255.0;       // poisson: photon count at intensity 1

  absl::Status Validate() const;
};

// out = clamp(in + n, 0, 1), n ~ N(0, sigma^2) per channel value.
absl::StatusOr<Image> GaussianImageNoise(const Image& image, double sigma,
                                         Rng& rng);
// out = clamp(Poisson(in * peak) / peak, 0, 1) per channel value.
absl::StatusOr<Image> PoissonImageNoise(const Image& image, double peak,
                                        Rng& rng);
// Each pixel independently altered with probability `amount`; an altered
// pixel has all channels set to 1 (probability salt_ratio) or to 0.
absl::StatusOr<Image> SaltPepperNoise(const Image& image, double amount,
                                      double salt_ratio, Rng& rng);
// out = clamp(in + in * n, 0, 1), n ~ N(0, sigma^2).
absl::StatusOr<Image> SpeckleNoise(const Image& image, double sigma,
                                   Rng& rng);

absl::StatusOr<Image> ApplyNoise(const Image& image, const NoiseSpec& spec,
                                 Rng& rng);

}  // namespace vqaprobe

#endif  // VQAPROBE_PERTURBATION_NOISE_H_
