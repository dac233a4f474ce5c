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

#ifndef VQAPROBE_CORE_DATASET_H_
#define VQAPROBE_CORE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace vqaprobe {

// One scored ground-truth answer. `answer` is always stored normalized.
struct AnswerScore {
  std::string answer;
  double score = 0.0;

  bool operator==(const AnswerScore&) const = default;
};

struct Sample {
  std::string id;
  // Relative to the dataset's image root.
  std::string image_ref;
  std::string question;
  std::vector<AnswerScore> answers;

  bool operator==(const Sample&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::string source_split;
  std::vector<Sample> samples;
  // Directory that image refs resolve against. Not serialized; set by the
  // loader to the manifest's directory unless overridden.
  std::filesystem::path image_root;

  std::filesystem::path ImagePath(const Sample& sample) const {
    return image_root / sample.image_ref;
  }
};

struct SubsampleSpec {
  int64_t max_n = 15000;
  uint64_t seed = 0;
};

// Official VQA scoring: min(1, count / 3) per answer, zero counts dropped.
// Answers are normalized; counts for answers that collide after
// normalization are summed.
std::vector<AnswerScore> VqaAnswerScores(
    const std::map<std::string, int64_t>& human_counts);

// Score of `answer` against the sample's ground truth, 0 when absent.
double ScoreOf(const Sample& sample, std::string_view answer);

// Validates and normalizes. Errors name the offending sample id.
absl::StatusOr<DatasetManifest> ParseManifest(const nlohmann::json& json);
absl::StatusOr<DatasetManifest> LoadManifest(const std::filesystem::path& path);

nlohmann::json ManifestToJson(const DatasetManifest& manifest);
absl::Status WriteManifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path);

// Seeded uniform draw of min(|dataset|, max_n) samples without replacement.
// Selected samples keep their manifest order, so the result is a pure
// function of (dataset, spec).
DatasetManifest Subsample(const DatasetManifest& dataset,
                          const SubsampleSpec& spec);

}  // namespace vqaprobe

#endif  // VQAPROBE_CORE_DATASET_H_
