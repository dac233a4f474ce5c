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

#ifndef VQAPROBE_STORE_RUNNER_H_
#define VQAPROBE_STORE_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "vqaprobe/adapter/adapter.h"
#include "vqaprobe/core/dataset.h"
#include "vqaprobe/metrics/estimators.h"
#include "vqaprobe/perturbation/calibration.h"

namespace vqaprobe {

struct RunConfig {
  // Recorded in the header; the runner talks to the adapter it is given.
  std::string model_url;
  std::filesystem::path dataset;
  // Defaults to the manifest's directory.
  std::optional<std::filesystem::path> image_root;
  std::filesystem::path out_dir;
  uint64_t seed = 0;
  MetricOptions metrics;
  int64_t max_samples = 15000;
  int calibration_vectors = kDefaultCalibrationVectors;
  int parallelism = 4;
  // Evaluate at most this many pending samples, then stop.
  std::optional<int64_t> limit;

  absl::Status Validate() const;
};

// Everything that determines the records. Parallelism, limit and the output
// location are left out; so is the endpoint URL, which may change between a
// run and its resumption.
nlohmann::json RunConfigToJson(const RunConfig& config);

std::filesystem::path ResultsPath(const std::filesystem::path& out_dir,
                                  std::string_view model,
                                  std::string_view dataset);
std::filesystem::path CalibrationPath(const std::filesystem::path& out_dir,
                                      std::string_view model,
                                      std::string_view dataset);

// Loads the manifest, applies the image root override and subsamples.
absl::StatusOr<DatasetManifest> LoadRunDataset(const RunConfig& config);

// Per-dimension std of image features and question embeddings over up to
// `n_vectors` sampled data vectors. Only declared capabilities are queried.
absl::StatusOr<CalibrationFile> ComputeCalibration(
    Adapter& adapter, const ModelCapabilities& capabilities,
    const DatasetManifest& dataset, uint64_t seed, int n_vectors);

struct RunSummary {
  std::filesystem::path results;
  std::optional<std::filesystem::path> calibration;
  int64_t dataset_samples = 0;
  int64_t skipped = 0;
  int64_t evaluated = 0;
  int64_t errored = 0;
  int64_t pending = 0;
  int64_t corrupt_lines = 0;
};

using ProgressFn = std::function<void(int64_t done, int64_t total)>;

// Nothing is written when the capabilities request fails.
absl::StatusOr<RunSummary> RunEvaluation(const RunConfig& config,
                                         Adapter& adapter,
                                         const ProgressFn& progress = nullptr);

}  // namespace vqaprobe

#endif  // VQAPROBE_STORE_RUNNER_H_
