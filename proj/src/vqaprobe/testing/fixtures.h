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

#ifndef VQAPROBE_TESTING_FIXTURES_H_
#define VQAPROBE_TESTING_FIXTURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vqaprobe/core/dataset.h"
#include "vqaprobe/core/image.h"

namespace vqaprobe::testing {

// The 20 synthetic questions, in sample order.
const std::vector<std::string>& FixtureQuestions();

// Distinct 16x16 RGB pattern for sample `index`.
Image FixtureImage(int index);

// Writes `n` samples (n <= 20 uses the fixed question list; larger n
// cycles through it with numbered variants) as PNG files plus
// `<dir>/<name>.json`. Returns the loaded manifest.
absl::StatusOr<DatasetManifest> WriteFixtureDataset(
    const std::filesystem::path& dir, const std::string& name = "tiny",
    int n = 20);

// In-memory image loader over a manifest.
absl::StatusOr<std::string> LoadSampleImage(const DatasetManifest& dataset,
                                            const Sample& sample);

}  // namespace vqaprobe::testing

#endif  // VQAPROBE_TESTING_FIXTURES_H_
