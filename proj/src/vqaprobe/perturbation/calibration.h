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

#ifndef VQAPROBE_PERTURBATION_CALIBRATION_H_
#define VQAPROBE_PERTURBATION_CALIBRATION_H_

#include <filesystem>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "fmt/format.h"
#include "json.hpp"
#include "vqaprobe/core/matrix.h"
#include "vqaprobe/core/random.h"

namespace vqaprobe {

// Per-dimension spread of a vector space (image features or question
// token embeddings), used to size Gaussian noise to the data's own range.
struct CalibrationStats {
  int dim = 0;
  std::vector<double> std;
  int n_vectors = 0;

  bool operator==(const CalibrationStats&) const = default;
};

inline constexpr int kDefaultCalibrationVectors = 500;

// Draws min(target_n, vectors.size()) vectors uniformly without replacement
// and returns their per-dimension population standard deviation.
absl::StatusOr<CalibrationStats> CalibrateStd(
    const std::vector<std::vector<double>>& vectors, int target_n, Rng& rng);

nlohmann::json CalibrationToJson(const CalibrationStats& stats);
absl::StatusOr<CalibrationStats> CalibrationFromJson(const nlohmann::json& j);

// Both spaces calibrated for one (model, dataset); either may be absent when
// the adapter lacks the capability.
struct CalibrationFile {
  std::optional<CalibrationStats> image_features;
  std::optional<CalibrationStats> question_embedding;
};

absl::Status WriteCalibrationFile(const CalibrationFile& file,
                                  const std::filesystem::path& path);
absl::StatusOr<CalibrationFile> ReadCalibrationFile(
    const std::filesystem::path& path);

// out[r,d] = in[r,d] + N(0, (scale * std[d])^2). No clamping.
template <typename Tag>
absl::StatusOr<DenseMatrix<Tag>> GaussianVectorNoise(
    const DenseMatrix<Tag>& matrix, const CalibrationStats& stats,
    double scale, Rng& rng) {
  if (matrix.cols() != stats.dim ||
      stats.std.size() != static_cast<size_t>(stats.dim)) {
    return absl::InvalidArgumentError(
        fmt::format("dimension mismatch: matrix has {} columns, calibration "
                    "has {}",
                    matrix.cols(), stats.dim));
  }
  if (!(scale > 0.0)) {
    return absl::InvalidArgumentError("noise scale must be > 0");
  }
  DenseMatrix<Tag> out = matrix;
  for (int r = 0; r < out.rows(); ++r) {
    for (int d = 0; d < out.cols(); ++d) {
      const double sd = scale * stats.std[d];
      if (sd > 0.0) out(r, d) += rng.Normal(0.0, sd);
    }
  }
  return out;
}

}  // namespace vqaprobe

#endif  // VQAPROBE_PERTURBATION_CALIBRATION_H_
