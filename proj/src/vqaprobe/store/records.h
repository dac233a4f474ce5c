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

#ifndef VQAPROBE_STORE_RECORDS_H_
#define VQAPROBE_STORE_RECORDS_H_

#include <string>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "vqaprobe/metrics/sample_metrics.h"

namespace vqaprobe {

// One results line. Keys not listed below are carried in `extra` and written
// back unchanged.
//
//   sample_id, image_ref, question   strings
//   answers     [{"answer", "score"}]  ground truth
//   original    [{"answer", "prob"}]   top-k of the unperturbed input
//   accuracy    number in [0,1] or null
//   error       string, only when the original prediction failed
//   metrics     {<metric id>: {"value", "reason", "errored", "trials",
//                              "mean_top1_prob"?}}
nlohmann::json SampleMetricsToJson(const SampleMetrics& m);
absl::StatusOr<SampleMetrics> SampleMetricsFromJson(const nlohmann::json& j);

// Single-line serialization without the trailing newline.
std::string SampleMetricsToLine(const SampleMetrics& m);

}  // namespace vqaprobe

#endif  // VQAPROBE_STORE_RECORDS_H_
