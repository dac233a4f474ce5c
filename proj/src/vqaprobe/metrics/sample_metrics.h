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

#ifndef VQAPROBE_METRICS_SAMPLE_METRICS_H_
#define VQAPROBE_METRICS_SAMPLE_METRICS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vqaprobe/adapter/protocol.h"
#include "vqaprobe/core/dataset.h"

namespace vqaprobe {

// Every per-sample quantity reported in [0,100]. kAccuracy is stored as a
// fraction on the record and scaled on read.
enum class MetricId {
  kAccuracy,
  kQuestionBias,
  kImageBias,
  kRobImage,
  kRobFeature,
  kRobQuestion,
  kSearRob,
  kUncertainty,
};

inline constexpr std::array<MetricId, 8> kAllMetrics = {
    MetricId::kAccuracy,   MetricId::kQuestionBias, MetricId::kImageBias,
    MetricId::kRobImage,   MetricId::kRobFeature,   MetricId::kRobQuestion,
    MetricId::kSearRob,    MetricId::kUncertainty};

// The metrics estimated from trials, i.e. kAllMetrics without accuracy.
inline constexpr std::array<MetricId, 7> kTrialMetrics = {
    MetricId::kQuestionBias, MetricId::kImageBias,   MetricId::kRobImage,
    MetricId::kRobFeature,   MetricId::kRobQuestion, MetricId::kSearRob,
    MetricId::kUncertainty};

std::string_view MetricIdName(MetricId id);
std::optional<MetricId> ParseMetricId(std::string_view name);
// Position in kTrialMetrics. `id` must not be kAccuracy.
size_t TrialMetricIndex(MetricId id);

struct TrialRecord {
  MetricId kind = MetricId::kQuestionBias;
  int trial_index = 0;
  // Replacement sample id, noise kind, rule id, ...
  std::string perturbation;
  std::string answer;
  // answer equals the original top-1 after normalization.
  bool unchanged = false;
  // image_bias: no noun-disjoint replacement was found.
  bool fallback = false;
  // uncertainty: the full dropout distribution of this trial.
  std::vector<ScoredAnswer> topk;

  bool operator==(const TrialRecord&) const = default;
};

struct MetricResult {
  double value = 0;
  std::vector<TrialRecord> trials;
  // uncertainty only: max over answers of the trial-averaged probability.
  std::optional<double> mean_top1_prob;

  bool operator==(const MetricResult&) const = default;
};

// A metric is either computed, null (capability missing or metric not
// applicable, with a reason) or errored (the adapter failed).
struct MetricOutcome {
  std::optional<MetricResult> result;
  std::string reason;
  bool errored = false;

  static MetricOutcome Value(MetricResult r) { return {std::move(r), "", false}; }
  static MetricOutcome Null(std::string reason) {
    return {std::nullopt, std::move(reason), false};
  }
  static MetricOutcome Error(std::string reason) {
    return {std::nullopt, std::move(reason), true};
  }
  bool operator==(const MetricOutcome&) const = default;
};

struct SampleMetrics {
  std::string sample_id;
  std::string image_ref;
  std::string question;
  std::vector<AnswerScore> answers;
  PredictResponse original;
  // Absent when the original prediction failed.
  std::optional<double> accuracy;
  std::array<MetricOutcome, kTrialMetrics.size()> metrics;
  // Sample-level failure (e.g. the original prediction).
  std::optional<std::string> error;
  // Fields written by newer versions, kept verbatim.
  nlohmann::json extra = nlohmann::json::object();

  const MetricOutcome& outcome(MetricId id) const {
    return metrics[TrialMetricIndex(id)];
  }
  MetricOutcome& outcome(MetricId id) { return metrics[TrialMetricIndex(id)]; }

  // Value in [0,100] (accuracy scaled), or nullopt when null or errored.
  std::optional<double> Value(MetricId id) const;

  bool operator==(const SampleMetrics&) const = default;
};

// 100 * unchanged / trials.
double UnchangedPercent(const std::vector<TrialRecord>& trials);

}  // namespace vqaprobe

#endif  // VQAPROBE_METRICS_SAMPLE_METRICS_H_
