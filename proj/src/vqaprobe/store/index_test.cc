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

#include "vqaprobe/store/index.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "fmt/format.h"
#include "gtest/gtest.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/store/results_file.h"

namespace vqaprobe {
namespace {

namespace fs = std::filesystem;

SampleMetrics Record(std::string id, std::optional<double> sear) {
  SampleMetrics m;
  m.sample_id = std::move(id);
  m.question = "q " + m.sample_id;
  m.accuracy = 1.0;
  for (MetricId k : kTrialMetrics) m.outcome(k) = MetricOutcome::Null("disabled");
  if (sear) m.outcome(MetricId::kSearRob) = MetricOutcome::Value({*sear, {}, {}});
  return m;
}

// Values on a coarse grid so ties and exact bin edges are common.
std::vector<SampleMetrics> RandomRecords(Rng& rng, int n) {
  std::vector<SampleMetrics> out;
  for (int i = 0; i < n; ++i) {
    SampleMetrics m = Record(fmt::format("r{:05d}", rng.Index(100000)), std::nullopt);
    m.accuracy = rng.Index(4) / 3.0;
    for (MetricId id : kTrialMetrics) {
      if (rng.Bernoulli(0.15)) continue;
      const double v = rng.Bernoulli(0.5) ? 10.0 * rng.Index(11) : 100 * rng.Uniform();
      m.outcome(id) = MetricOutcome::Value({v, {}, {}});
    }
    out.push_back(std::move(m));
  }
  return out;
}

TEST(Histogram, BinEdges) {
  EXPECT_EQ(HistogramBin(0, 2), 0);
  EXPECT_EQ(HistogramBin(49.999, 2), 0);
  EXPECT_EQ(HistogramBin(50, 2), 1);
  EXPECT_EQ(HistogramBin(100, 2), 1);
  EXPECT_EQ(HistogramBin(100, 20), 19);
  for (int bins = 1; bins <= kMaxHistogramBins; ++bins) {
    for (int k = 0; k < bins; ++k) {
      EXPECT_EQ(HistogramBin(HistogramEdge(k, bins), bins), k);
    }
  }
}

TEST(ResultsIndex, HistogramExamples) {
  ResultsIndex index;
  index.Add("m", "all100", {}, {Record("a", 100.0), Record("b", 100.0)});
  index.Add("m", "three", {},
            {Record("a", 0.0), Record("b", 50.0), Record("c", 100.0), Record("d", {})});
  Histogram h = *index.BuildHistogram({"m", "all100", MetricId::kSearRob, 20});
  EXPECT_EQ(h.percent.back(), 100.0);
  for (int k = 0; k < 19; ++k) EXPECT_EQ(h.percent[k], 0.0);

  h = *index.BuildHistogram({"m", "three", MetricId::kSearRob, 2});
  EXPECT_EQ(h.counts, (std::vector<int64_t>{1, 2}));
  EXPECT_EQ(h.null_count, 1);
  EXPECT_EQ(h.evaluated, 3);

  EXPECT_EQ(index.BuildHistogram({"m", "nope", MetricId::kSearRob, 2}).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(index.BuildHistogram({"m", "three", MetricId::kSearRob, 0}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(index.BuildHistogram({"m", "three", MetricId::kSearRob, 101}).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ResultsIndex, FilterExamples) {
  ResultsIndex index;
  index.Add("m", "d", {}, {Record("z", 30.0), Record("a", 31.0), Record("b", 30.0)});
  FilterPage page = *index.Filter({"m", "d", MetricId::kSearRob, 30, 30, 0, 50});
  EXPECT_EQ(page.total, 2);
  ASSERT_EQ(page.hits.size(), 2u);
  EXPECT_EQ(page.hits[0].sample_id, "b");
  EXPECT_EQ(page.hits[1].sample_id, "z");

  page = *index.Filter({"m", "d", MetricId::kSearRob, 0, 100, 1, 1});
  EXPECT_EQ(page.total, 3);
  ASSERT_EQ(page.hits.size(), 1u);
  EXPECT_EQ(page.hits[0].sample_id, "z");

  EXPECT_FALSE(index.Filter({"m", "d", MetricId::kSearRob, 40, 30, 0, 50}).ok());
  EXPECT_FALSE(index.Filter({"m", "d", MetricId::kSearRob, -1, 30, 0, 50}).ok());
  EXPECT_FALSE(index.Filter({"m", "d", MetricId::kSearRob, 0, 30, 0, 501}).ok());
  EXPECT_EQ(index.Filter({"x", "d", MetricId::kSearRob, 0, 30, 0, 5}).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(ResultsIndex, QueriesMatchLinearScan) {
  Rng rng(1234);
  ResultsIndex index;
  std::vector<SampleMetrics> records = RandomRecords(rng, 1000);
  index.Add("m", "d", {}, records);
  const DatasetResults& dr = *index.Find("m", "d");

  for (int q = 0; q < 100; ++q) {
    const MetricId metric = kAllMetrics[rng.Index(kAllMetrics.size())];
    double lo = rng.Bernoulli(0.3) ? 10.0 * rng.Index(11) : 100 * rng.Uniform();
    double hi = rng.Bernoulli(0.3) ? 10.0 * rng.Index(11) : 100 * rng.Uniform();
    if (lo > hi) std::swap(lo, hi);

    std::vector<std::pair<double, std::string>> expected;
    for (const SampleMetrics& m : dr.records) {
      const std::optional<double> v = m.Value(metric);
      if (v && *v >= lo && *v <= hi) expected.push_back({*v, m.sample_id});
    }
    std::sort(expected.begin(), expected.end());
    const int64_t offset = rng.Index(40);
    const FilterPage page = *index.Filter({"m", "d", metric, lo, hi, offset, 500});
    ASSERT_EQ(page.total, static_cast<int64_t>(expected.size()));
    for (size_t i = 0; i < page.hits.size(); ++i) {
      ASSERT_EQ(page.hits[i].value, expected[offset + i].first);
      ASSERT_EQ(page.hits[i].sample_id, expected[offset + i].second);
    }
    EXPECT_EQ(page.hits.size(),
              std::min<size_t>(500, expected.size() - std::min<size_t>(offset, expected.size())));

    const int bins = 1 + static_cast<int>(rng.Index(kMaxHistogramBins));
    std::vector<int64_t> counts(bins, 0);
    int64_t evaluated = 0;
    for (const SampleMetrics& m : dr.records) {
      const std::optional<double> v = m.Value(metric);
      if (!v) continue;
      ++evaluated;
      for (int k = 0; k < bins; ++k) {
        const double a = 100.0 * k / bins;
        const double b = 100.0 * (k + 1) / bins;
        if (*v >= a && (*v < b || (k == bins - 1 && *v <= 100.0))) {
          ++counts[k];
          break;
        }
      }
    }
    const Histogram h = *index.BuildHistogram({"m", "d", metric, bins});
    ASSERT_EQ(h.counts, counts);
    EXPECT_EQ(h.evaluated + h.null_count, static_cast<int64_t>(dr.records.size()));
    double sum = 0;
    for (double p : h.percent) sum += p;
    if (evaluated > 0) EXPECT_NEAR(sum, 100.0, 1e-9);

    const FilterPage all = *index.Filter({"m", "d", metric, 0, 100, 0, 0});
    EXPECT_EQ(all.total, evaluated);
  }
}

TEST(ResultsIndex, DuplicateIdsKeepTheLastLine) {
  ResultsIndex index;
  index.Add("m", "d", {}, {Record("a", 10.0), Record("b", 20.0), Record("a", 90.0)});
  const DatasetResults& d = *index.Find("m", "d");
  EXPECT_EQ(d.records.size(), 2u);
  EXPECT_EQ(d.duplicates, 1);
  EXPECT_EQ(*d.Find("a")->Value(MetricId::kSearRob), 90.0);
  EXPECT_EQ(d.Find("c"), nullptr);
}

class IndexDirTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "vqaprobe_index_test";
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void Write(const std::string& model, const std::string& dataset,
             const std::vector<SampleMetrics>& records, int64_t params) {
    RunHeader h;
    h.capabilities = {{"model_name", model}, {"parameter_count", params}};
    auto w = ResultsWriter::Create(dir_ / model / (dataset + ".ndjson"), h);
    ASSERT_TRUE(w.ok()) << w.status();
    for (const SampleMetrics& r : records) ASSERT_TRUE((*w)->Write(r).ok());
  }

  fs::path dir_;
};

TEST_F(IndexDirTest, TwoModelsTwoDatasets) {
  Rng rng(77);
  for (const char* model : {"beta", "alpha"}) {
    for (const char* dataset : {"gqa", "vqa2"}) {
      Write(model, dataset, RandomRecords(rng, 50), 1000);
    }
  }
  fs::create_directories(dir_ / "broken");
  std::ofstream(dir_ / "broken" / "x.ndjson") << "garbage\n";

  absl::StatusOr<ResultsIndex> index = ResultsIndex::Build(dir_);
  ASSERT_TRUE(index.ok()) << index.status();
  EXPECT_EQ(index->size(), 4u);
  EXPECT_EQ(index->Models(), (std::vector<std::string>{"alpha", "beta"}));
  ASSERT_EQ(index->problems().size(), 1u);
  EXPECT_EQ(index->ParameterCount("alpha"), 1000);

  for (const std::string& model : index->Models()) {
    std::vector<AggregateRow> rows;
    for (const DatasetResults* d : index->DatasetsOf(model)) {
      // Aggregates equal a fresh recomputation from the raw file.
      const ResultsFile f = *ReadResultsFile(d->file, ReadMode::kStrict);
      std::map<std::string, SampleMetrics> by_id;
      for (const SampleMetrics& r : f.records) by_id[r.sample_id] = r;
      std::vector<SampleMetrics> latest;
      for (auto& [id, r] : by_id) latest.push_back(r);
      EXPECT_EQ(d->aggregate, AggregateDataset(model, d->dataset, latest));
      rows.push_back(d->aggregate);
    }
    EXPECT_EQ(*index->Global(model), AggregateGlobal(model, rows));
  }

  absl::StatusOr<ResultsIndex> again = ResultsIndex::Build(dir_);
  for (const std::string& model : index->Models()) {
    EXPECT_EQ(index->Global(model), again->Global(model));
  }
}

TEST_F(IndexDirTest, EmptyDirectoryFails) {
  fs::create_directories(dir_);
  EXPECT_FALSE(ResultsIndex::Build(dir_).ok());
  EXPECT_FALSE(ResultsIndex::Build(dir_ / "absent").ok());
}

}  // namespace
}  // namespace vqaprobe
