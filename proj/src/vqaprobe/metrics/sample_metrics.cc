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

#include "vqaprobe/metrics/sample_metrics.h"

namespace vqaprobe {

std::string_view MetricIdName(MetricId id) {
  switch (id) {
    case MetricId::kAccuracy:
      return "accuracy";
    case MetricId::kQuestionBias:
      return "question_bias";
    case MetricId::kImageBias:
      return "image_bias";
    case MetricId::kRobImage:
      return "rob_image";
    case MetricId::kRobFeature:
      return "rob_feature";
    case MetricId::kRobQuestion:
      return "rob_question";
    case MetricId::kSearRob:
      return "sear_rob";
    case MetricId::kUncertainty:
      return "uncertainty";
  }
  return "accuracy";
}

std::optional<MetricId> ParseMetricId(std::string_view name) {
  for (MetricId id : kAllMetrics) {
    if (MetricIdName(id) == name) return id;
  }
  return std::nullopt;
}

size_t TrialMetricIndex(MetricId id) {
  return static_cast<size_t>(id) - 1;
}

std::optional<double> SampleMetrics::Value(MetricId id) const {
  if (id == MetricId::kAccuracy) {
    if (!accuracy) return std::nullopt;
    return 100.0 * *accuracy;
  }
  const MetricOutcome& o = outcome(id);
  if (!o.result) return std::nullopt;
  return o.result->value;
}

double UnchangedPercent(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) return 0;
  size_t unchanged = 0;
  for (const TrialRecord& t : trials) unchanged += t.unchanged ? 1 : 0;
  return 100.0 * static_cast<double>(unchanged) /
         static_cast<double>(trials.size());
}

}  // namespace vqaprobe
