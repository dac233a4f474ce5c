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

#ifndef VQAPROBE_STORE_INDEX_H_
#define VQAPROBE_STORE_INDEX_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vqaprobe/metrics/aggregate.h"
#include "vqaprobe/store/results_file.h"

namespace vqaprobe {

inline constexpr int kMaxFilterLimit = 500;
inline constexpr int kDefaultHistogramBins = 20;
inline constexpr int kMaxHistogramBins = 100;

struct FilterQuery {
  std::string model;
  std::string dataset;
  MetricId metric = MetricId::kAccuracy;
  double min = 0;
  double max = 100;
  int64_t offset = 0;
  int64_t limit = 50;

  absl::Status Validate() const;
};

struct FilterHit {
  std::string sample_id;
  double value = 0;
  std::string question;
  std::string image_ref;

  bool operator==(const FilterHit&) const = default;
};

struct FilterPage {
  // All matches, before offset and limit.
  int64_t total = 0;
  std::vector<FilterHit> hits;

  bool operator==(const FilterPage&) const = default;
};

struct HistogramSpec {
  std::string model;
  std::string dataset;
  MetricId metric = MetricId::kAccuracy;
  int bins = kDefaultHistogramBins;

  absl::Status Validate() const;
};

struct Histogram {
  std::vector<int64_t> counts;
  // Share of evaluated samples, in percent.
  std::vector<double> percent;
  int64_t evaluated = 0;
  int64_t null_count = 0;

  bool operator==(const Histogram&) const = default;
};

// Bin k covers [100k/bins, 100(k+1)/bins); the last bin also holds 100.
int HistogramBin(double value, int bins);
double HistogramEdge(int k, int bins);

struct DatasetResults {
  std::string model;
  std::string dataset;
  std::filesystem::path file;
  RunHeader header;
  // Sorted by sample id; the last line wins for duplicate ids.
  std::vector<SampleMetrics> records;
  AggregateRow aggregate;
  // Per metric: (value, record index) ordered by value, then sample id.
  std::array<std::vector<std::pair<double, size_t>>, kAllMetrics.size()> sorted;
  std::vector<CorruptLine> corrupt;
  int64_t duplicates = 0;

  const SampleMetrics* Find(std::string_view sample_id) const;
};

struct IndexProblem {
  std::filesystem::path file;
  std::string error;
};

class ResultsIndex {
 public:
  // Scans `<dir>/<model>/<dataset>.ndjson`. Unreadable files are reported
  // in problems() and skipped. Unless `allow_empty`, fails when no file could
  // be loaded.
  static absl::StatusOr<ResultsIndex> Build(const std::filesystem::path& dir,
                                            bool allow_empty = false);

  void Add(std::string model, std::string dataset, RunHeader header,
           std::vector<SampleMetrics> records);

  std::vector<std::string> Models() const;
  std::vector<const DatasetResults*> DatasetsOf(std::string_view model) const;
  const DatasetResults* Find(std::string_view model, std::string_view dataset) const;
  std::optional<AggregateRow> Global(std::string_view model) const;
  std::optional<int64_t> ParameterCount(std::string_view model) const;

  absl::StatusOr<FilterPage> Filter(const FilterQuery& q) const;
  absl::StatusOr<Histogram> BuildHistogram(const HistogramSpec& spec) const;

  const std::vector<IndexProblem>& problems() const { return problems_; }
  size_t size() const { return results_.size(); }

 private:
  absl::StatusOr<const DatasetResults*> Lookup(std::string_view model,
                                               std::string_view dataset) const;

  std::map<std::pair<std::string, std::string>, DatasetResults> results_;
  std::vector<IndexProblem> problems_;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_STORE_INDEX_H_
