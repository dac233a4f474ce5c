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

#include "vqaprobe/metrics/aggregate.h"

#include <algorithm>

namespace vqaprobe {
namespace {

// Incremental mean; exact when all inputs are equal.
class RunningMean {
 public:
  void Add(double x) {
    ++n_;
    mean_ += (x - mean_) / n_;
  }
  std::optional<double> Get() const {
    if (n_ == 0) return std::nullopt;
    return std::clamp(mean_, 0.0, 100.0);
  }

 private:
  int n_ = 0;
  double mean_ = 0;
};

}  // namespace

AggregateRow AggregateDataset(const std::string& model,
                              const std::string& dataset,
                              const std::vector<SampleMetrics>& records) {
  AggregateRow row;
  row.model = model;
  row.dataset = dataset;
  row.samples = static_cast<int>(records.size());
  for (MetricId id : kAllMetrics) {
    MetricAggregate& agg = row.at(id);
    RunningMean mean;
    for (const SampleMetrics& r : records) {
      if (std::optional<double> v = r.Value(id)) {
        mean.Add(*v);
        ++agg.evaluated;
      } else if (id == MetricId::kAccuracy ? r.error.has_value()
                                           : r.outcome(id).errored) {
        ++agg.errored;
      } else {
        ++agg.null_count;
      }
    }
    agg.mean = mean.Get();
  }
  return row;
}

AggregateRow AggregateGlobal(const std::string& model,
                             const std::vector<AggregateRow>& rows) {
  AggregateRow global;
  global.model = model;
  for (const AggregateRow& r : rows) global.samples += r.samples;
  for (MetricId id : kAllMetrics) {
    MetricAggregate& agg = global.at(id);
    RunningMean mean;
    for (const AggregateRow& r : rows) {
      const MetricAggregate& a = r.at(id);
      agg.evaluated += a.evaluated;
      agg.null_count += a.null_count;
      agg.errored += a.errored;
      if (a.mean) mean.Add(*a.mean);
    }
    agg.mean = mean.Get();
  }
  return global;
}

nlohmann::json AggregateRowToJson(const AggregateRow& row) {
  nlohmann::json metrics = nlohmann::json::object();
  for (MetricId id : kAllMetrics) {
    const MetricAggregate& a = row.at(id);
    metrics[std::string(MetricIdName(id))] = {
        {"mean", a.mean ? nlohmann::json(*a.mean) : nlohmann::json(nullptr)},
        {"evaluated", a.evaluated},
        {"null", a.null_count},
        {"errored", a.errored}};
  }
  nlohmann::json j = {{"model", row.model},
                      {"samples", row.samples},
                      {"metrics", metrics}};
  if (!row.dataset.empty()) j["dataset"] = row.dataset;
  return j;
}

}  // namespace vqaprobe
