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

#ifndef VQAPROBE_METRICS_AGGREGATE_H_
#define VQAPROBE_METRICS_AGGREGATE_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vqaprobe/metrics/sample_metrics.h"

namespace vqaprobe {

struct MetricAggregate {
  // Mean over evaluated samples (or datasets, for global rows).
  std::optional<double> mean;
  int evaluated = 0;
  int null_count = 0;
  int errored = 0;

  bool operator==(const MetricAggregate&) const = default;
};

struct AggregateRow {
  std::string model;
  // Empty for a model's global row.
  std::string dataset;
  int samples = 0;
  std::array<MetricAggregate, kAllMetrics.size()> metrics;

  const MetricAggregate& at(MetricId id) const {
    return metrics[static_cast<size_t>(id)];
  }
  MetricAggregate& at(MetricId id) { return metrics[static_cast<size_t>(id)]; }

  bool operator==(const AggregateRow&) const = default;
};

// Per metric: mean over non-null per-sample values in [0,100].
AggregateRow AggregateDataset(const std::string& model,
                              const std::string& dataset,
                              const std::vector<SampleMetrics>& records);

// Unweighted mean of the dataset means; datasets where a metric is null are
// left out of that metric's mean. Counts are summed.
AggregateRow AggregateGlobal(const std::string& model,
                             const std::vector<AggregateRow>& rows);

nlohmann::json AggregateRowToJson(const AggregateRow& row);

}  // namespace vqaprobe

#endif  // VQAPROBE_METRICS_AGGREGATE_H_
