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

#include "gtest/gtest.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/metrics/estimators.h"

namespace vqaprobe {
namespace {

SampleMetrics WithValues(std::optional<double> accuracy,
                         std::optional<double> sear) {
  SampleMetrics m;
  m.accuracy = accuracy;
  for (MetricId id : kTrialMetrics) m.outcome(id) = MetricOutcome::Null("disabled");
  if (sear) m.outcome(MetricId::kSearRob) = MetricOutcome::Value({*sear, {}, {}});
  return m;
}

TEST(AggregateDataset, Examples) {
  const AggregateRow acc = AggregateDataset(
      "m", "d", {WithValues(1.0, std::nullopt), WithValues(0.0, std::nullopt)});
  EXPECT_EQ(acc.at(MetricId::kAccuracy).mean, 50.0);
  EXPECT_EQ(acc.samples, 2);

  const AggregateRow sear = AggregateDataset(
      "m", "d", {WithValues(1.0, 100.0), WithValues(1.0, std::nullopt),
                 WithValues(1.0, 0.0)});
  EXPECT_EQ(sear.at(MetricId::kSearRob).mean, 50.0);
  EXPECT_EQ(sear.at(MetricId::kSearRob).null_count, 1);
  EXPECT_EQ(sear.at(MetricId::kSearRob).evaluated, 2);
  EXPECT_FALSE(sear.at(MetricId::kUncertainty).mean.has_value());
}

TEST(AggregateDataset, SingleSampleIsIdentity) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.Uniform();
    const double s = 100 * rng.Uniform();
    const AggregateRow row = AggregateDataset("m", "d", {WithValues(a, s)});
    EXPECT_EQ(row.at(MetricId::kAccuracy).mean, 100 * a);
    EXPECT_EQ(row.at(MetricId::kSearRob).mean, s);
  }
}

TEST(AggregateDataset, ErrorsAreCountedSeparately) {
  SampleMetrics failed = WithValues(std::nullopt, std::nullopt);
  failed.error = "unavailable: down";
  for (MetricId id : kTrialMetrics) failed.outcome(id) = MetricOutcome::Error("x");
  const AggregateRow row =
      AggregateDataset("m", "d", {failed, WithValues(0.5, 20.0)});
  EXPECT_EQ(row.at(MetricId::kAccuracy).mean, 50.0);
  EXPECT_EQ(row.at(MetricId::kAccuracy).errored, 1);
  EXPECT_EQ(row.at(MetricId::kSearRob).errored, 1);
  EXPECT_EQ(row.at(MetricId::kSearRob).null_count, 0);
}

AggregateRow RowWith(MetricId id, std::optional<double> mean, int samples) {
  AggregateRow row;
  row.model = "m";
  row.dataset = "d";
  row.samples = samples;
  row.at(id).mean = mean;
  row.at(id).evaluated = mean ? samples : 0;
  row.at(id).null_count = mean ? 0 : samples;
  return row;
}

TEST(AggregateGlobal, MacroMean) {
  const AggregateRow g = AggregateGlobal(
      "m", {RowWith(MetricId::kAccuracy, 80.0, 1000),
            RowWith(MetricId::kAccuracy, 40.0, 3)});
  EXPECT_EQ(g.at(MetricId::kAccuracy).mean, 60.0);
  EXPECT_EQ(g.samples, 1003);
  EXPECT_TRUE(g.dataset.empty());

  const AggregateRow three = AggregateGlobal(
      "m", {RowWith(MetricId::kImageBias, 30.0, 5),
            RowWith(MetricId::kImageBias, std::nullopt, 5),
            RowWith(MetricId::kImageBias, 60.0, 5)});
  EXPECT_EQ(three.at(MetricId::kImageBias).mean, 45.0);
  EXPECT_EQ(three.at(MetricId::kImageBias).null_count, 5);
}

TEST(AggregateGlobal, IdenticalRowsAreAFixedPoint) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    AggregateRow row;
    for (MetricId id : kAllMetrics) {
      if (rng.Bernoulli(0.8)) row.at(id).mean = 100 * rng.Uniform();
    }
    const size_t copies = 1 + rng.Index(7);
    const AggregateRow g =
        AggregateGlobal("m", std::vector<AggregateRow>(copies, row));
    for (MetricId id : kAllMetrics) {
      EXPECT_EQ(g.at(id).mean, row.at(id).mean) << MetricIdName(id);
    }
  }
}

TEST(AggregateRowToJson, NullMeans) {
  const nlohmann::json j =
      AggregateRowToJson(RowWith(MetricId::kAccuracy, 12.5, 4));
  EXPECT_EQ(j["metrics"]["accuracy"]["mean"], 12.5);
  EXPECT_TRUE(j["metrics"]["sear_rob"]["mean"].is_null());
  EXPECT_EQ(j["dataset"], "d");
}

// Random trial outcomes, including empty and one-trial sets.
std::vector<TrialRecord> RandomTrials(Rng& rng, MetricId id) {
  std::vector<TrialRecord> trials(rng.Index(40));
  for (size_t t = 0; t < trials.size(); ++t) {
    trials[t].kind = id;
    trials[t].trial_index = static_cast<int>(t);
    trials[t].unchanged = rng.Bernoulli(rng.Uniform());
  }
  return trials;
}

TEST(MetricRange, FuzzedTrialsStayInRange) {
  Rng rng(2026);
  for (int round = 0; round < 300; ++round) {
    std::vector<SampleMetrics> records(1 + rng.Index(12));
    for (SampleMetrics& m : records) {
      if (rng.Bernoulli(0.9)) m.accuracy = rng.Uniform();
      for (MetricId id : kTrialMetrics) {
        if (id == MetricId::kUncertainty) {
          std::vector<std::vector<ScoredAnswer>> dists(2 + rng.Index(10));
          for (auto& d : dists) {
            double left = 1.0;
            for (size_t k = rng.Index(5); k > 0; --k) {
              const double p = left * rng.Uniform();
              d.push_back({std::string(1, static_cast<char>('a' + rng.Index(6))), p});
              left -= p;
            }
          }
          for (UncertaintyStatistic s : {UncertaintyStatistic::kOneMinusMax,
                                         UncertaintyStatistic::kEntropy}) {
            const double v = UncertaintyFromTrials(dists, s).first;
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 100.0);
          }
          m.outcome(id) = MetricOutcome::Value(
              {UncertaintyFromTrials(dists, UncertaintyStatistic::kEntropy).first,
               {},
               {}});
          continue;
        }
        std::vector<TrialRecord> trials = RandomTrials(rng, id);
        if (trials.empty()) {
          m.outcome(id) = MetricOutcome::Null("no trials");
          continue;
        }
        const double v = UnchangedPercent(trials);
        int recount = 0;
        for (const TrialRecord& t : trials) recount += t.unchanged ? 1 : 0;
        ASSERT_EQ(v, 100.0 * recount / trials.size());
        m.outcome(id) = MetricOutcome::Value({v, std::move(trials), {}});
      }
      for (MetricId id : kAllMetrics) {
        if (auto v = m.Value(id)) {
          ASSERT_GE(*v, 0.0);
          ASSERT_LE(*v, 100.0);
        }
      }
    }
    const AggregateRow row = AggregateDataset("m", "d", records);
    for (MetricId id : kAllMetrics) {
      if (auto mean = row.at(id).mean) {
        ASSERT_GE(*mean, 0.0);
        ASSERT_LE(*mean, 100.0);
      }
    }
    const AggregateRow g = AggregateGlobal("m", {row, row, row});
    for (MetricId id : kAllMetrics) {
      if (auto mean = g.at(id).mean) {
        ASSERT_GE(*mean, 0.0);
        ASSERT_LE(*mean, 100.0);
      }
    }
  }
}

}  // namespace
}  // namespace vqaprobe
