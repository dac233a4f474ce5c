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

#ifndef VQAPROBE_METRICS_ESTIMATORS_H_
#define VQAPROBE_METRICS_ESTIMATORS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "absl/status/statusor.h"
#include "vqaprobe/adapter/adapter.h"
#include "vqaprobe/core/dataset.h"
#include "vqaprobe/metrics/sample_metrics.h"
#include "vqaprobe/perturbation/calibration.h"
#include "vqaprobe/perturbation/noise.h"
#include "vqaprobe/sear/tagger.h"

namespace vqaprobe {

enum class UncertaintyStatistic {
  // 100 * (1 - max_a pbar(a))
  kOneMinusMax,
  // 100 * normalized entropy of pbar; unseen mass counts as one extra outcome.
  kEntropy,
};

std::string_view UncertaintyStatisticName(UncertaintyStatistic s);
std::optional<UncertaintyStatistic> ParseUncertaintyStatistic(std::string_view name);

inline constexpr int kMaxNounDisjointAttempts = 50;

struct MetricOptions {
  int trials = 10;
  // sigma, amount, salt_ratio and peak for the image noise kernels; the kind
  // rotates per trial.
  NoiseSpec noise;
  double feature_noise_scale = 1.0;
  double question_noise_scale = 1.0;
  UncertaintyStatistic uncertainty_statistic = UncertaintyStatistic::kOneMinusMax;
  std::set<MetricId> enabled = {kTrialMetrics.begin(), kTrialMetrics.end()};
};

using ImageLoader = std::function<absl::StatusOr<std::string>(const Sample&)>;

// Everything one sample's evaluation needs. All randomness is drawn from
// streams seeded by DeriveSeed(run_seed, sample.id, metric name, trial).
struct SampleContext {
  Adapter* adapter = nullptr;
  const ModelCapabilities* capabilities = nullptr;
  const DatasetManifest* dataset = nullptr;
  const Sample* sample = nullptr;
  ImageLoader load_image;
  const sear::PosTagger* tagger = nullptr;
  const CalibrationFile* calibration = nullptr;
  uint64_t run_seed = 0;
  MetricOptions options;
};

// Prediction state shared by the estimators of one sample.
struct Baseline {
  std::string image;  // PNG bytes of the sample's image
  PredictResponse original;
};

double AccuracyOf(const PredictResponse& original, const Sample& sample);

MetricOutcome QuestionBias(const SampleContext& ctx, const Baseline& base);
MetricOutcome ImageBias(const SampleContext& ctx, const Baseline& base);
MetricOutcome RobustnessImage(const SampleContext& ctx, const Baseline& base);
MetricOutcome RobustnessFeature(const SampleContext& ctx, const Baseline& base);
MetricOutcome RobustnessQuestion(const SampleContext& ctx, const Baseline& base);
MetricOutcome SearRobustness(const SampleContext& ctx, const Baseline& base);
MetricOutcome Uncertainty(const SampleContext& ctx, const Baseline& base);

// Uncertainty statistic over the trial distributions (missing answers count
// as probability 0). Returns {value in [0,100], max_a pbar(a)}.
std::pair<double, double> UncertaintyFromTrials(
    const std::vector<std::vector<ScoredAnswer>>& distributions,
    UncertaintyStatistic statistic);

// Original prediction, accuracy, then every enabled metric in kTrialMetrics
// order. Adapter failures are recorded on the result, never returned.
SampleMetrics EvaluateSample(const SampleContext& ctx);

}  // namespace vqaprobe

#endif  // VQAPROBE_METRICS_ESTIMATORS_H_
