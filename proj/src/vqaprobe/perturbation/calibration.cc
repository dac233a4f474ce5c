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

#include "vqaprobe/perturbation/calibration.h"

#include <cmath>
#include <fstream>

namespace vqaprobe {

using nlohmann::json;

absl::StatusOr<CalibrationStats> CalibrateStd(
    const std::vector<std::vector<double>>& vectors, int target_n, Rng& rng) {
  if (vectors.size() < 2) {
    return absl::InvalidArgumentError(fmt::format(
        "calibration needs at least 2 vectors, got {}", vectors.size()));
  }
  if (target_n < 2) {
    return absl::InvalidArgumentError("calibration target must be >= 2");
  }
  const size_t dim = vectors.front().size();
  if (dim == 0) return absl::InvalidArgumentError("vectors are empty");
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      return absl::InvalidArgumentError(
          "calibration vectors have different dimensions");
    }
  }

  const std::vector<size_t> picks =
      rng.SampleWithoutReplacement(vectors.size(), target_n);
  const double n = static_cast<double>(picks.size());

  std::vector<double> mean(dim, 0.0);
  for (size_t i : picks) {
    for (size_t d = 0; d < dim; ++d) mean[d] += vectors[i][d];
  }
  for (double& m : mean) m /= n;

  std::vector<double> var(dim, 0.0);
  for (size_t i : picks) {
    for (size_t d = 0; d < dim; ++d) {
      const double delta = vectors[i][d] - mean[d];
      var[d] += delta * delta;
    }
  }

  CalibrationStats stats;
  stats.dim = static_cast<int>(dim);
  stats.n_vectors = static_cast<int>(picks.size());
  stats.std.resize(dim);
  for (size_t d = 0; d < dim; ++d) {
    stats.std[d] = std::sqrt(var[d] / n);
    if (!std::isfinite(stats.std[d])) {
      return absl::InvalidArgumentError("calibration produced non-finite std");
    }
  }
  return stats;
}

json CalibrationToJson(const CalibrationStats& stats) {
  return {{"dim", stats.dim}, {"n_vectors", stats.n_vectors},
          {"std", stats.std}};
}

absl::StatusOr<CalibrationStats> CalibrationFromJson(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("std") ||
      !j.contains("n_vectors") || !j["std"].is_array()) {
    return absl::InvalidArgumentError(
        "calibration needs \"dim\", \"n_vectors\" and \"std\"");
  }
  CalibrationStats stats;
  try {
    stats.dim = j["dim"].get<int>();
    stats.n_vectors = j["n_vectors"].get<int>();
    stats.std = j["std"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        fmt::format("bad calibration field: {}", e.what()));
  }
  if (stats.dim < 1 || stats.std.size() != static_cast<size_t>(stats.dim)) {
    return absl::InvalidArgumentError("calibration \"std\" length != dim");
  }
  if (stats.n_vectors < 2) {
    return absl::InvalidArgumentError("calibration n_vectors must be >= 2");
  }
  for (double s : stats.std) {
    if (!std::isfinite(s) || s < 0.0) {
      return absl::InvalidArgumentError("calibration std must be finite, >= 0");
    }
  }
  return stats;
}

absl::Status WriteCalibrationFile(const CalibrationFile& file,
                                  const std::filesystem::path& path) {
  json j = json::object();
  if (file.image_features) {
    j["image_features"] = CalibrationToJson(*file.image_features);
  }
  if (file.question_embedding) {
    j["question_embedding"] = CalibrationToJson(*file.question_embedding);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          fmt::format("cannot write {}", tmp.string()));
    }
    out << j.dump() << '\n';
    if (!out) return absl::DataLossError("short write of calibration file");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(
        fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<CalibrationFile> ReadCalibrationFile(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(fmt::format("cannot open {}", path.string()));
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        fmt::format("{} is not a calibration JSON object", path.string()));
  }
  CalibrationFile file;
  for (const char* key : {"image_features", "question_embedding"}) {
    if (!j.contains(key)) continue;
    absl::StatusOr<CalibrationStats> stats = CalibrationFromJson(j[key]);
    if (!stats.ok()) return stats.status();
    (std::string_view(key) == "image_features" ? file.image_features
                                               : file.question_embedding) =
        *std::move(stats);
  }
  return file;
}

}  // namespace vqaprobe
