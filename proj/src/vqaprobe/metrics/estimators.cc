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

#include "vqaprobe/metrics/estimators.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "fmt/format.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/core/text.h"
#include "vqaprobe/sear/rules.h"

namespace vqaprobe {
namespace {

Rng TrialRng(const SampleContext& ctx, MetricId metric, int trial) {
  return Rng(DeriveSeed(ctx.run_seed, ctx.sample->id, MetricIdName(metric),
                        static_cast<uint64_t>(trial)));
}

bool SameAnswer(const std::string& a, const std::string& b) {
  return NormalizeAnswer(a) == NormalizeAnswer(b);
}

std::string Describe(const absl::Status& status) {
  return std::string(status.message());
}

// Indices drawn without replacement while the pool lasts; once exhausted a
// fresh permutation starts.
std::vector<size_t> DrawIndices(size_t pool, int n, Rng& rng) {
  std::vector<size_t> out;
  while (static_cast<int>(out.size()) < n) {
    const size_t k = std::min(pool, static_cast<size_t>(n) - out.size());
    for (size_t i : rng.SampleWithoutReplacement(pool, k)) out.push_back(i);
  }
  return out;
}

std::optional<std::string> MissingCapability(const SampleContext& ctx,
                                             std::initializer_list<Capability> needed) {
  for (Capability c : needed) {
    if (!ctx.capabilities->Has(c)) {
      return fmt::format("capability missing: {}", CapabilityName(c));
    }
  }
  return std::nullopt;
}

// Runs `trials` predictions built by `make` and scores them against the
// original top-1.
template <typename MakeRequest>
MetricOutcome RunTrials(const SampleContext& ctx, const Baseline& base,
                        MetricId kind, int trials, MakeRequest make) {
  MetricResult result;
  for (int t = 0; t < trials; ++t) {
    std::string perturbation;
    bool fallback = false;
    absl::StatusOr<PredictRequest> request = make(t, perturbation, fallback);
    if (!request.ok()) {
      return MetricOutcome::Error(
          fmt::format("trial {}: {}", t, Describe(request.status())));
    }
    absl::StatusOr<PredictResponse> response = ctx.adapter->Predict(*request);
    if (!response.ok()) {
      return MetricOutcome::Error(
          fmt::format("trial {}: {}", t, Describe(response.status())));
    }
    TrialRecord record;
    record.kind = kind;
    record.trial_index = t;
    record.perturbation = std::move(perturbation);
    record.answer = response->top1();
    record.unchanged = SameAnswer(record.answer, base.original.top1());
    record.fallback = fallback;
    result.trials.push_back(std::move(record));
  }
  result.value = UnchangedPercent(result.trials);
  return MetricOutcome::Value(std::move(result));
}

PredictRequest RawRequest(std::string image, std::string question) {
  PredictRequest r;
  r.image = std::move(image);
  r.question = std::move(question);
  return r;
}

}  // namespace

std::string_view UncertaintyStatisticName(UncertaintyStatistic s) {
  return s == UncertaintyStatistic::kEntropy ? "entropy" : "one_minus_max";
}

std::optional<UncertaintyStatistic> ParseUncertaintyStatistic(
    std::string_view name) {
  if (name == "one_minus_max") return UncertaintyStatistic::kOneMinusMax;
  if (name == "entropy") return UncertaintyStatistic::kEntropy;
  return std::nullopt;
}

double AccuracyOf(const PredictResponse& original, const Sample& sample) {
  return ScoreOf(sample, original.top1());
}

MetricOutcome QuestionBias(const SampleContext& ctx, const Baseline& base) {
  const Sample& sample = *ctx.sample;
  // One representative sample per distinct other image.
  std::vector<const Sample*> pool;
  std::set<std::string> seen = {sample.image_ref};
  for (const Sample& s : ctx.dataset->samples) {
    if (seen.insert(s.image_ref).second) pool.push_back(&s);
  }
  if (pool.empty()) {
    return MetricOutcome::Null("dataset has fewer than 2 distinct images");
  }
  Rng rng = TrialRng(ctx, MetricId::kQuestionBias, 0);
  const std::vector<size_t> draws =
      DrawIndices(pool.size(), ctx.options.trials, rng);
  return RunTrials(
      ctx, base, MetricId::kQuestionBias, ctx.options.trials,
      [&](int t, std::string& perturbation,
          bool&) -> absl::StatusOr<PredictRequest> {
        const Sample& replacement = *pool[draws[t]];
        perturbation = replacement.id;
        absl::StatusOr<std::string> image = ctx.load_image(replacement);
        if (!image.ok()) return image.status();
        return RawRequest(*std::move(image), sample.question);
      });
}

MetricOutcome ImageBias(const SampleContext& ctx, const Baseline& base) {
  const Sample& sample = *ctx.sample;
  std::vector<std::string> candidates;
  std::set<std::string> seen = {sample.question};
  for (const Sample& s : ctx.dataset->samples) {
    if (seen.insert(s.question).second) candidates.push_back(s.question);
  }
  if (candidates.empty()) {
    return MetricOutcome::Null("dataset has fewer than 2 distinct questions");
  }
  const std::set<std::string> nouns = ctx.tagger->ExtractNouns(sample.question);
  auto disjoint = [&](const std::string& q) {
    for (const std::string& n : ctx.tagger->ExtractNouns(q)) {
      if (nouns.contains(n)) return false;
    }
    return true;
  };

  Rng rng = TrialRng(ctx, MetricId::kImageBias, 0);
  std::vector<bool> used(candidates.size(), false);
  size_t used_count = 0;
  return RunTrials(
      ctx, base, MetricId::kImageBias, ctx.options.trials,
      [&](int, std::string& perturbation,
          bool& fallback) -> absl::StatusOr<PredictRequest> {
        if (used_count == candidates.size()) {
          std::fill(used.begin(), used.end(), false);
          used_count = 0;
        }
        std::vector<size_t> available;
        for (size_t i = 0; i < candidates.size(); ++i) {
          if (!used[i]) available.push_back(i);
        }
        std::optional<size_t> chosen;
        for (int attempt = 0; attempt < kMaxNounDisjointAttempts; ++attempt) {
          const size_t i = available[rng.Index(available.size())];
          if (disjoint(candidates[i])) {
            chosen = i;
            break;
          }
        }
        if (!chosen) {
          chosen = available[rng.Index(available.size())];
          fallback = true;
        }
        used[*chosen] = true;
        ++used_count;
        perturbation = candidates[*chosen];
        return RawRequest(base.image, candidates[*chosen]);
      });
}

MetricOutcome RobustnessImage(const SampleContext& ctx, const Baseline& base) {
  absl::StatusOr<Image> image = DecodePng(base.image);
  if (!image.ok()) {
    return MetricOutcome::Null(
        fmt::format("image decode failure: {}", Describe(image.status())));
  }
  return RunTrials(
      ctx, base, MetricId::kRobImage, ctx.options.trials,
      [&](int t, std::string& perturbation,
          bool&) -> absl::StatusOr<PredictRequest> {
        NoiseSpec spec = ctx.options.noise;
        spec.kind = kNoiseCycle[t % kNoiseCycle.size()];
        perturbation = std::string(NoiseKindName(spec.kind));
        Rng rng = TrialRng(ctx, MetricId::kRobImage, t);
        absl::StatusOr<Image> noisy = ApplyNoise(*image, spec, rng);
        if (!noisy.ok()) return noisy.status();
        absl::StatusOr<std::string> png = EncodePng(*noisy);
        if (!png.ok()) return png.status();
        return RawRequest(*std::move(png), ctx.sample->question);
      });
}

MetricOutcome RobustnessFeature(const SampleContext& ctx, const Baseline& base) {
  if (auto missing = MissingCapability(
          ctx, {Capability::kImageFeatures, Capability::kPredictComposed})) {
    return MetricOutcome::Null(*missing);
  }
  if (!ctx.calibration || !ctx.calibration->image_features) {
    return MetricOutcome::Null("no calibration for image features");
  }
  absl::StatusOr<FeatureMatrix> features =
      ctx.adapter->ExtractImageFeatures(base.image);
  if (!features.ok()) {
    return MetricOutcome::Error(
        fmt::format("image features: {}", Describe(features.status())));
  }
  const CalibrationStats& stats = *ctx.calibration->image_features;
  const double scale = ctx.options.feature_noise_scale;
  return RunTrials(
      ctx, base, MetricId::kRobFeature, ctx.options.trials,
      [&](int t, std::string& perturbation,
          bool&) -> absl::StatusOr<PredictRequest> {
        perturbation = fmt::format("gaussian x{}", scale);
        Rng rng = TrialRng(ctx, MetricId::kRobFeature, t);
        absl::StatusOr<FeatureMatrix> noisy =
            GaussianVectorNoise(*features, stats, scale, rng);
        if (!noisy.ok()) return noisy.status();
        PredictRequest r;
        r.features = *std::move(noisy);
        r.question = ctx.sample->question;
        return r;
      });
}

MetricOutcome RobustnessQuestion(const SampleContext& ctx,
                                 const Baseline& base) {
  if (auto missing = MissingCapability(
          ctx, {Capability::kQuestionEmbedding, Capability::kPredictComposed})) {
    return MetricOutcome::Null(*missing);
  }
  if (!ctx.calibration || !ctx.calibration->question_embedding) {
    return MetricOutcome::Null("no calibration for question embeddings");
  }
  absl::StatusOr<EmbeddingMatrix> embedding =
      ctx.adapter->ExtractQuestionEmbedding(ctx.sample->question);
  if (!embedding.ok()) {
    return MetricOutcome::Error(
        fmt::format("question embedding: {}", Describe(embedding.status())));
  }
  const CalibrationStats& stats = *ctx.calibration->question_embedding;
  const double scale = ctx.options.question_noise_scale;
  return RunTrials(
      ctx, base, MetricId::kRobQuestion, ctx.options.trials,
      [&](int t, std::string& perturbation,
          bool&) -> absl::StatusOr<PredictRequest> {
        perturbation = fmt::format("gaussian x{}", scale);
        Rng rng = TrialRng(ctx, MetricId::kRobQuestion, t);
        absl::StatusOr<EmbeddingMatrix> noisy =
            GaussianVectorNoise(*embedding, stats, scale, rng);
        if (!noisy.ok()) return noisy.status();
        PredictRequest r;
        r.image = base.image;
        r.embedding = *std::move(noisy);
        return r;
      });
}

MetricOutcome SearRobustness(const SampleContext& ctx, const Baseline& base) {
  std::vector<sear::RewriteResult> applied;
  for (const sear::RewriteResult& r :
       sear::ApplyAll(*ctx.tagger, ctx.sample->question)) {
    if (r.applied) applied.push_back(r);
  }
  if (applied.empty()) return MetricOutcome::Null("no rule applies");
  return RunTrials(
      ctx, base, MetricId::kSearRob, static_cast<int>(applied.size()),
      [&](int t, std::string& perturbation,
          bool&) -> absl::StatusOr<PredictRequest> {
        perturbation = std::string(sear::SearRuleName(applied[t].rule));
        return RawRequest(base.image, *applied[t].rewritten);
      });
}

std::pair<double, double> UncertaintyFromTrials(
    const std::vector<std::vector<ScoredAnswer>>& distributions,
    UncertaintyStatistic statistic) {
  if (distributions.empty()) return {0.0, 1.0};
  std::map<std::string, double> mean;
  for (const auto& topk : distributions) {
    for (const ScoredAnswer& a : topk) {
      mean[NormalizeAnswer(a.answer)] += a.prob;
    }
  }
  const double n = static_cast<double>(distributions.size());
  double max_p = 0;
  double total = 0;
  for (auto& [answer, p] : mean) {
    p /= n;
    max_p = std::max(max_p, p);
    total += p;
  }
  max_p = std::clamp(max_p, 0.0, 1.0);
  if (statistic == UncertaintyStatistic::kOneMinusMax) {
    return {std::clamp(100.0 * (1.0 - max_p), 0.0, 100.0), max_p};
  }
  std::vector<double> probs;
  for (const auto& [answer, p] : mean) {
    if (p > 0) probs.push_back(p);
  }
  const double rest = 1.0 - total;
  if (rest > 1e-12) probs.push_back(rest);
  if (probs.size() < 2) return {0.0, max_p};
  double h = 0;
  for (double p : probs) h -= p * std::log(p);
  const double value = 100.0 * h / std::log(static_cast<double>(probs.size()));
  return {std::clamp(value, 0.0, 100.0), max_p};
}

MetricOutcome Uncertainty(const SampleContext& ctx, const Baseline& base) {
  if (auto missing = MissingCapability(ctx, {Capability::kDropout})) {
    return MetricOutcome::Null(*missing);
  }
  if (ctx.options.trials < 2) {
    return MetricOutcome::Null("uncertainty needs at least 2 trials");
  }
  MetricResult result;
  std::vector<std::vector<ScoredAnswer>> distributions;
  for (int t = 0; t < ctx.options.trials; ++t) {
    PredictRequest r = RawRequest(base.image, ctx.sample->question);
    r.dropout = true;
    r.seed = DeriveSeed(ctx.run_seed, ctx.sample->id,
                        MetricIdName(MetricId::kUncertainty), t);
    absl::StatusOr<PredictResponse> response = ctx.adapter->Predict(r);
    if (!response.ok()) {
      return MetricOutcome::Error(
          fmt::format("trial {}: {}", t, Describe(response.status())));
    }
    TrialRecord record;
    record.kind = MetricId::kUncertainty;
    record.trial_index = t;
    record.perturbation = "dropout";
    record.answer = response->top1();
    record.unchanged = SameAnswer(record.answer, base.original.top1());
    record.topk = response->topk;
    distributions.push_back(response->topk);
    result.trials.push_back(std::move(record));
  }
  const auto [value, max_p] =
      UncertaintyFromTrials(distributions, ctx.options.uncertainty_statistic);
  result.value = value;
  result.mean_top1_prob = max_p;
  return MetricOutcome::Value(std::move(result));
}

SampleMetrics EvaluateSample(const SampleContext& ctx) {
  const Sample& sample = *ctx.sample;
  SampleMetrics out;
  out.sample_id = sample.id;
  out.image_ref = sample.image_ref;
  out.question = sample.question;
  out.answers = sample.answers;

  auto fail_all = [&out](const std::string& why) {
    out.error = why;
    for (MetricId id : kTrialMetrics) {
      out.outcome(id) = MetricOutcome::Error(why);
    }
    return out;
  };

  Baseline base;
  absl::StatusOr<std::string> image = ctx.load_image(sample);
  if (!image.ok()) return fail_all(fmt::format("image: {}", Describe(image.status())));
  base.image = *std::move(image);
  absl::StatusOr<PredictResponse> original =
      ctx.adapter->Predict(RawRequest(base.image, sample.question));
  if (!original.ok()) {
    return fail_all(
        fmt::format("original prediction: {}", Describe(original.status())));
  }
  base.original = *std::move(original);
  out.original = base.original;
  out.accuracy = AccuracyOf(base.original, sample);

  for (MetricId id : kTrialMetrics) {
    if (!ctx.options.enabled.contains(id)) {
      out.outcome(id) = MetricOutcome::Null("disabled");
      continue;
    }
    switch (id) {
      case MetricId::kQuestionBias:
        out.outcome(id) = QuestionBias(ctx, base);
        break;
      case MetricId::kImageBias:
        out.outcome(id) = ImageBias(ctx, base);
        break;
      case MetricId::kRobImage:
        out.outcome(id) = RobustnessImage(ctx, base);
        break;
      case MetricId::kRobFeature:
        out.outcome(id) = RobustnessFeature(ctx, base);
        break;
      case MetricId::kRobQuestion:
        out.outcome(id) = RobustnessQuestion(ctx, base);
        break;
      case MetricId::kSearRob:
        out.outcome(id) = SearRobustness(ctx, base);
        break;
      case MetricId::kUncertainty:
        out.outcome(id) = Uncertainty(ctx, base);
        break;
      case MetricId::kAccuracy:
        break;
    }
  }
  return out;
}

}  // namespace vqaprobe
