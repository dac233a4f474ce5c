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

#include "vqaprobe/perturbation/noise.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"

namespace vqaprobe {
namespace {

absl::Status CheckImage(const Image& image) {
  if (image.empty() || image.width < 1 || image.height < 1 ||
      image.channels < 1) {
    return absl::InvalidArgumentError("image is empty");
  }
  return absl::OkStatus();
}

float Clamp01(double v) {
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

}  // namespace

std::string_view NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kPoisson:
      return "poisson";
    case NoiseKind::kSaltPepper:
      return "salt_pepper";
    case NoiseKind::kSpeckle:
      return "speckle";
  }
  return "unknown";
}

std::optional<NoiseKind> ParseNoiseKind(std::string_view name) {
  for (NoiseKind kind : kNoiseCycle) {
    if (NoiseKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

absl::Status NoiseSpec::Validate() const {
  switch (kind) {
    case NoiseKind::kGaussian:
    case NoiseKind::kSpeckle:
      if (!(sigma > 0.0)) {
        return absl::InvalidArgumentError(
            fmt::format("{} noise needs sigma > 0, got {}",
                        NoiseKindName(kind), sigma));
      }
      break;
    case NoiseKind::kPoisson:
      if (!(peak > 0.0)) {
        return absl::InvalidArgumentError(
            fmt::format("poisson noise needs peak > 0, got {}", peak));
      }
      break;
    case NoiseKind::kSaltPepper:
      if (!(amount > 0.0 && amount < 1.0)) {
        return absl::InvalidArgumentError(fmt::format(
            "salt & pepper amount must be in (0,1), got {}", amount));
      }
      if (!(salt_ratio >= 0.0 && salt_ratio <= 1.0)) {
        return absl::InvalidArgumentError(fmt::format(
            "salt & pepper salt_ratio must be in [0,1], got {}", salt_ratio));
      }
      break;
  }
  return absl::OkStatus();
}

absl::StatusOr<Image> GaussianImageNoise(const Image& image, double sigma,
                                         Rng& rng) {
  if (absl::Status s = CheckImage(image); !s.ok()) return s;
  if (!(sigma > 0.0)) return absl::InvalidArgumentError("sigma must be > 0");
  Image out = image;
  for (float& v : out.pixels) v = Clamp01(v + rng.Normal(0.0, sigma));
  return out;
}

absl::StatusOr<Image> PoissonImageNoise(const Image& image, double peak,
                                        Rng& rng) {
  if (absl::Status s = CheckImage(image); !s.ok()) return s;
  if (!(peak > 0.0)) return absl::InvalidArgumentError("peak must be > 0");
  Image out = image;
  for (float& v : out.pixels) {
    const double lambda = std::max(0.0, static_cast<double>(v)) * peak;
    v = Clamp01(static_cast<double>(rng.Poisson(lambda)) / peak);
  }
  return out;
}

absl::StatusOr<Image> SaltPepperNoise(const Image& image, double amount,
                                      double salt_ratio, Rng& rng) {
  if (absl::Status s = CheckImage(image); !s.ok()) return s;
  if (!(amount > 0.0 && amount < 1.0)) {
    return absl::InvalidArgumentError("amount must be in (0,1)");
  }
  if (!(salt_ratio >= 0.0 && salt_ratio <= 1.0)) {
    return absl::InvalidArgumentError("salt_ratio must be in [0,1]");
  }
  Image out = image;
  const size_t pixels = out.pixel_count();
  const size_t channels = static_cast<size_t>(out.channels);
  for (size_t p = 0; p < pixels; ++p) {
    if (!rng.Bernoulli(amount)) continue;
    const float value = rng.Bernoulli(salt_ratio) ? 1.0f : 0.0f;
    std::fill_n(out.pixels.begin() + p * channels, channels, value);
  }
  return out;
}

absl::StatusOr<Image> SpeckleNoise(const Image& image, double sigma,
                                   Rng& rng) {
  if (absl::Status s = CheckImage(image); !s.ok()) return s;
  if (!(sigma > 0.0)) return absl::InvalidArgumentError("sigma must be > 0");
  Image out = image;
  for (float& v : out.pixels) v = Clamp01(v + v * rng.Normal(0.0, sigma));
  return out;
}

absl::StatusOr<Image> ApplyNoise(const Image& image, const NoiseSpec& spec,
                                 Rng& rng) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  switch (spec.kind) {
    case NoiseKind::kGaussian:
      return GaussianImageNoise(image, spec.sigma, rng);
    case NoiseKind::kPoisson:
      return PoissonImageNoise(image, spec.peak, rng);
    case NoiseKind::kSaltPepper:
      return SaltPepperNoise(image, spec.amount, spec.salt_ratio, rng);
    case NoiseKind::kSpeckle:
      return SpeckleNoise(image, spec.sigma, rng);
  }
  return absl::InvalidArgumentError("unknown noise kind");
}

}  // namespace vqaprobe
