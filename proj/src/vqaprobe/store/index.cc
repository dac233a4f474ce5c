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
#include <cmath>

#include "fmt/format.h"

namespace vqaprobe {

absl::Status FilterQuery::Validate() const {
  if (!(min >= 0.0 && max <= 100.0 && min <= max)) {
    return absl::InvalidArgumentError(
        fmt::format("invalid range [{}, {}]; need 0 <= min <= max <= 100", min, max));
  }
  if (offset < 0) return absl::InvalidArgumentError("offset must be >= 0");
  if (limit < 0 || limit > kMaxFilterLimit) {
    return absl::InvalidArgumentError(
        fmt::format("limit must be in [0, {}]", kMaxFilterLimit));
  }
  return absl::OkStatus();
}

absl::Status HistogramSpec::Validate() const {
  if (bins < 1 || bins > kMaxHistogramBins) {
    return absl::InvalidArgumentError(
        fmt::format("bins must be in [1, {}]", kMaxHistogramBins));
  }
  return absl::OkStatus();
}

double HistogramEdge(int k, int bins) { return 100.0 * k / bins; }

int HistogramBin(double value, int bins) {
  int k = static_cast<int>(std::floor(value * bins / 100.0));
  k = std::clamp(k, 0, bins - 1);
  while (k > 0 && value < HistogramEdge(k, bins)) --k;
  while (k < bins - 1 && value >= HistogramEdge(k + 1, bins)) ++k;
  return k;
}

const SampleMetrics* DatasetResults::Find(std::string_view sample_id) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), sample_id,
      [](const SampleMetrics& r, std::string_view id) { return r.sample_id < id; });
  if (it == records.end() || it->sample_id != sample_id) return nullptr;
  return &*it;
}

absl::StatusOr<ResultsIndex> ResultsIndex::Build(const std::filesystem::path& dir,
                                                bool allow_empty) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    return absl::NotFoundError(fmt::format("{} is not a directory", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& model_dir : std::filesystem::directory_iterator(dir, ec)) {
    if (!model_dir.is_directory()) continue;
    for (const auto& entry : std::filesystem::directory_iterator(model_dir.path(), ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ndjson") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  ResultsIndex index;
  for (const std::filesystem::path& f : files) {
    absl::StatusOr<ResultsFile> file = ReadResultsFile(f);
    if (!file.ok()) {
      index.problems_.push_back({f, std::string(file.status().message())});
      continue;
    }
    index.Add(f.parent_path().filename().string(), f.stem().string(),
              std::move(file->header), std::move(file->records));
    DatasetResults& added = index.results_.at(
        {f.parent_path().filename().string(), f.stem().string()});
    added.file = f;
    added.corrupt = std::move(file->corrupt);
    for (const CorruptLine& c : added.corrupt) {
      index.problems_.push_back({f, fmt::format("line {}: {}", c.line, c.error)});
    }
  }
  if (index.results_.empty() && !allow_empty) {
    return absl::NotFoundError(
        fmt::format("no results files under {}", dir.string()));
  }
  return index;
}

void ResultsIndex::Add(std::string model, std::string dataset, RunHeader header,
                       std::vector<SampleMetrics> records) {
  DatasetResults r;
  r.model = model;
  r.dataset = dataset;
  r.header = std::move(header);
  std::stable_sort(records.begin(), records.end(),
                   [](const SampleMetrics& a, const SampleMetrics& b) {
                     return a.sample_id < b.sample_id;
                   });
  for (SampleMetrics& m : records) {
    if (!r.records.empty() && r.records.back().sample_id == m.sample_id) {
      r.records.back() = std::move(m);
      ++r.duplicates;
    } else {
      r.records.push_back(std::move(m));
    }
  }
  r.aggregate = AggregateDataset(model, dataset, r.records);
  for (MetricId id : kAllMetrics) {
    auto& sorted = r.sorted[static_cast<size_t>(id)];
    for (size_t i = 0; i < r.records.size(); ++i) {
      if (std::optional<double> v = r.records[i].Value(id)) sorted.push_back({*v, i});
    }
    // Records are in id order, so a stable sort on value breaks ties by id.
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  results_[{std::move(model), std::move(dataset)}] = std::move(r);
}

std::vector<std::string> ResultsIndex::Models() const {
  std::vector<std::string> models;
  for (const auto& [key, r] : results_) {
    if (models.empty() || models.back() != key.first) models.push_back(key.first);
  }
  return models;
}

std::vector<const DatasetResults*> ResultsIndex::DatasetsOf(
    std::string_view model) const {
  std::vector<const DatasetResults*> out;
  for (const auto& [key, r] : results_) {
    if (key.first == model) out.push_back(&r);
  }
  return out;
}

const DatasetResults* ResultsIndex::Find(std::string_view model,
                                         std::string_view dataset) const {
  auto it = results_.find({std::string(model), std::string(dataset)});
  return it == results_.end() ? nullptr : &it->second;
}

std::optional<AggregateRow> ResultsIndex::Global(std::string_view model) const {
  std::vector<AggregateRow> rows;
  for (const DatasetResults* r : DatasetsOf(model)) rows.push_back(r->aggregate);
  if (rows.empty()) return std::nullopt;
  return AggregateGlobal(std::string(model), rows);
}

std::optional<int64_t> ResultsIndex::ParameterCount(std::string_view model) const {
  for (const DatasetResults* r : DatasetsOf(model)) {
    const nlohmann::json& p = r->header.capabilities.value(
        "parameter_count", nlohmann::json());
    if (p.is_number_integer()) return p.get<int64_t>();
  }
  return std::nullopt;
}

absl::StatusOr<const DatasetResults*> ResultsIndex::Lookup(
    std::string_view model, std::string_view dataset) const {
  const DatasetResults* r = Find(model, dataset);
  if (r == nullptr) {
    return absl::NotFoundError(
        fmt::format("no results for model '{}' on dataset '{}'", model, dataset));
  }
  return r;
}

absl::StatusOr<FilterPage> ResultsIndex::Filter(const FilterQuery& q) const {
  if (absl::Status s = q.Validate(); !s.ok()) return s;
  absl::StatusOr<const DatasetResults*> r = Lookup(q.model, q.dataset);
  if (!r.ok()) return r.status();
  const auto& sorted = (*r)->sorted[static_cast<size_t>(q.metric)];
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), q.min,
                             [](const auto& e, double v) { return e.first < v; });
  auto hi = std::upper_bound(lo, sorted.end(), q.max,
                             [](double v, const auto& e) { return v < e.first; });
  FilterPage page;
  page.total = hi - lo;
  const int64_t begin = std::min(q.offset, page.total);
  const int64_t end = std::min(page.total, begin + q.limit);
  for (auto it = lo + begin; it != lo + end; ++it) {
    const SampleMetrics& m = (*r)->records[it->second];
    page.hits.push_back({m.sample_id, it->first, m.question, m.image_ref});
  }
  return page;
}

absl::StatusOr<Histogram> ResultsIndex::BuildHistogram(const HistogramSpec& spec) const {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  absl::StatusOr<const DatasetResults*> r = Lookup(spec.model, spec.dataset);
  if (!r.ok()) return r.status();
  const auto& sorted = (*r)->sorted[static_cast<size_t>(spec.metric)];
  Histogram h;
  h.counts.assign(spec.bins, 0);
  h.percent.assign(spec.bins, 0.0);
  for (const auto& [value, i] : sorted) ++h.counts[HistogramBin(value, spec.bins)];
  h.evaluated = static_cast<int64_t>(sorted.size());
  h.null_count = static_cast<int64_t>((*r)->records.size()) - h.evaluated;
  if (h.evaluated > 0) {
    for (int k = 0; k < spec.bins; ++k) {
      h.percent[k] = 100.0 * static_cast<double>(h.counts[k]) / h.evaluated;
    }
  }
  return h;
}

}  // namespace vqaprobe
