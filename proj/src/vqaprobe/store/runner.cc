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

#include "vqaprobe/store/runner.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "fmt/chrono.h"
#include "fmt/format.h"
#include "vqaprobe/adapter/decorators.h"
#include "vqaprobe/core/image.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/sear/tagger.h"
#include "vqaprobe/store/results_file.h"

#ifndef VQAPROBE_VERSION
#define VQAPROBE_VERSION "0.0.0"
#endif

namespace vqaprobe {
namespace {

using nlohmann::json;

std::string Message(const absl::Status& s) { return std::string(s.message()); }

std::string NowUtc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     fmt::gmtime(std::chrono::system_clock::to_time_t(
                         std::chrono::system_clock::now())));
}

json WithoutUrl(json config) {
  config.erase("model_url");
  return config;
}

json CalibrationSummary(const std::filesystem::path& path,
                        const CalibrationFile& file) {
  json j = {{"file", path.filename().string()}};
  if (file.image_features) {
    j["image_features"] = {{"dim", file.image_features->dim},
                           {"n_vectors", file.image_features->n_vectors}};
  }
  if (file.question_embedding) {
    j["question_embedding"] = {{"dim", file.question_embedding->dim},
                               {"n_vectors", file.question_embedding->n_vectors}};
  }
  return j;
}

template <typename Tag>
void AppendRows(const DenseMatrix<Tag>& m, std::vector<std::vector<double>>& out) {
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (int c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    out.push_back(std::move(row));
  }
}

bool Enabled(const RunConfig& config, MetricId id) {
  return config.metrics.enabled.contains(id);
}

}  // namespace

absl::Status RunConfig::Validate() const {
  if (metrics.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (max_samples < 1) return absl::InvalidArgumentError("max_samples must be >= 1");
  if (parallelism < 1) return absl::InvalidArgumentError("parallelism must be >= 1");
  if (calibration_vectors < 2) {
    return absl::InvalidArgumentError("calibration_vectors must be >= 2");
  }
  if (limit && *limit < 0) return absl::InvalidArgumentError("limit must be >= 0");
  if (!(metrics.feature_noise_scale > 0) || !(metrics.question_noise_scale > 0)) {
    return absl::InvalidArgumentError("noise scales must be > 0");
  }
  if (dataset.empty()) return absl::InvalidArgumentError("dataset path is empty");
  if (out_dir.empty()) return absl::InvalidArgumentError("output directory is empty");
  return metrics.noise.Validate();
}

json RunConfigToJson(const RunConfig& config) {
  json enabled = json::array();
  for (MetricId id : kTrialMetrics) {
    if (Enabled(config, id)) enabled.push_back(std::string(MetricIdName(id)));
  }
  const NoiseSpec& n = config.metrics.noise;
  json j = {
      {"model_url", config.model_url},
      {"dataset", std::filesystem::absolute(config.dataset).lexically_normal().string()},
      {"seed", config.seed},
      {"trials", config.metrics.trials},
      {"noise",
       {{"sigma", n.sigma}, {"amount", n.amount}, {"salt_ratio", n.salt_ratio},
        {"peak", n.peak}}},
      {"feature_noise_scale", config.metrics.feature_noise_scale},
      {"question_noise_scale", config.metrics.question_noise_scale},
      {"uncertainty_statistic",
       std::string(UncertaintyStatisticName(config.metrics.uncertainty_statistic))},
      {"metrics", enabled},
      {"max_samples", config.max_samples},
      {"calibration_vectors", config.calibration_vectors}};
  if (config.image_root) {
    j["image_root"] =
        std::filesystem::absolute(*config.image_root).lexically_normal().string();
  }
  return j;
}

std::filesystem::path ResultsPath(const std::filesystem::path& out_dir,
                                  std::string_view model,
                                  std::string_view dataset) {
  return out_dir / std::string(model) / fmt::format("{}.ndjson", dataset);
}

std::filesystem::path CalibrationPath(const std::filesystem::path& out_dir,
                                      std::string_view model,
                                      std::string_view dataset) {
  return out_dir / std::string(model) / fmt::format("{}.calib.json", dataset);
}

absl::StatusOr<DatasetManifest> LoadRunDataset(const RunConfig& config) {
  absl::StatusOr<DatasetManifest> manifest = LoadManifest(config.dataset);
  if (!manifest.ok()) return manifest.status();
  if (config.image_root) manifest->image_root = *config.image_root;
  manifest->image_root =
      std::filesystem::absolute(manifest->image_root).lexically_normal();
  DatasetManifest subset =
      Subsample(*manifest, {.max_n = config.max_samples, .seed = config.seed});
  subset.image_root = manifest->image_root;
  return subset;
}

absl::StatusOr<CalibrationFile> ComputeCalibration(
    Adapter& adapter, const ModelCapabilities& capabilities,
    const DatasetManifest& dataset, uint64_t seed, int n_vectors) {
  CalibrationFile file;
  Rng pick(DeriveSeed(seed, dataset.name, "calibration", 0));
  const std::vector<size_t> chosen = pick.SampleWithoutReplacement(
      dataset.samples.size(), static_cast<size_t>(n_vectors));

  if (capabilities.Has(Capability::kImageFeatures)) {
    std::vector<std::vector<double>> rows;
    std::set<std::string> seen;
    for (size_t i : chosen) {
      const Sample& s = dataset.samples[i];
      if (!seen.insert(s.image_ref).second) continue;
      // Samples with unreadable images are skipped.
      absl::StatusOr<std::string> png = ReadFileBytes(dataset.ImagePath(s));
      if (!png.ok()) continue;
      absl::StatusOr<FeatureMatrix> m = adapter.ExtractImageFeatures(*png);
      if (!m.ok()) {
        return absl::Status(m.status().code(),
                            fmt::format("image features for {}: {}", s.id,
                                        Message(m.status())));
      }
      AppendRows(*m, rows);
    }
    Rng rng(DeriveSeed(seed, dataset.name, "calibration", 1));
    absl::StatusOr<CalibrationStats> stats = CalibrateStd(rows, n_vectors, rng);
    if (!stats.ok()) return stats.status();
    file.image_features = *std::move(stats);
  }
  if (capabilities.Has(Capability::kQuestionEmbedding)) {
    std::vector<std::vector<double>> rows;
    for (size_t i : chosen) {
      const Sample& s = dataset.samples[i];
      absl::StatusOr<EmbeddingMatrix> m = adapter.ExtractQuestionEmbedding(s.question);
      if (!m.ok()) {
        return absl::Status(m.status().code(),
                            fmt::format("question embedding for {}: {}", s.id,
                                        Message(m.status())));
      }
      AppendRows(*m, rows);
    }
    Rng rng(DeriveSeed(seed, dataset.name, "calibration", 2));
    absl::StatusOr<CalibrationStats> stats = CalibrateStd(rows, n_vectors, rng);
    if (!stats.ok()) return stats.status();
    file.question_embedding = *std::move(stats);
  }
  return file;
}

absl::StatusOr<RunSummary> RunEvaluation(const RunConfig& config,
                                         Adapter& adapter,
                                         const ProgressFn& progress) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<ModelCapabilities> caps = adapter.GetCapabilities();
  if (!caps.ok()) {
    return absl::Status(caps.status().code(),
                        fmt::format("capabilities: {}", Message(caps.status())));
  }
  if (absl::Status s = caps->Validate(); !s.ok()) return s;
  absl::StatusOr<DatasetManifest> dataset = LoadRunDataset(config);
  if (!dataset.ok()) return dataset.status();

  RunSummary summary;
  summary.results = ResultsPath(config.out_dir, caps->model_name, dataset->name);
  summary.dataset_samples = static_cast<int64_t>(dataset->samples.size());
  const json config_json = RunConfigToJson(config);

  std::set<std::string> done;
  const bool resuming = std::filesystem::exists(summary.results);
  if (resuming) {
    absl::StatusOr<ResultsFile> existing = ReadResultsFile(summary.results);
    if (!existing.ok()) return existing.status();
    if (WithoutUrl(existing->header.config) != WithoutUrl(config_json)) {
      return absl::FailedPreconditionError(fmt::format(
          "{} was produced with a different configuration", summary.results.string()));
    }
    for (const SampleMetrics& r : existing->records) done.insert(r.sample_id);
    summary.corrupt_lines = static_cast<int64_t>(existing->corrupt.size());
  }

  // Calibration is computed once and reused on resume.
  CalibrationFile calibration;
  const bool wants_features = Enabled(config, MetricId::kRobFeature) &&
                              caps->Has(Capability::kImageFeatures) &&
                              caps->Has(Capability::kPredictComposed);
  const bool wants_embedding = Enabled(config, MetricId::kRobQuestion) &&
                               caps->Has(Capability::kQuestionEmbedding) &&
                               caps->Has(Capability::kPredictComposed);
  json calibration_ref = nullptr;
  if (wants_features || wants_embedding) {
    const std::filesystem::path path =
        CalibrationPath(config.out_dir, caps->model_name, dataset->name);
    if (std::filesystem::exists(path)) {
      absl::StatusOr<CalibrationFile> read = ReadCalibrationFile(path);
      if (!read.ok()) return read.status();
      calibration = *std::move(read);
    } else {
      ModelCapabilities needed = *caps;
      if (!wants_features) needed.supports.erase(Capability::kImageFeatures);
      if (!wants_embedding) needed.supports.erase(Capability::kQuestionEmbedding);
      absl::StatusOr<CalibrationFile> computed = ComputeCalibration(
          adapter, needed, *dataset, config.seed, config.calibration_vectors);
      if (!computed.ok()) return computed.status();
      calibration = *std::move(computed);
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      if (ec) {
        return absl::InternalError(fmt::format(
            "cannot create {}: {}", path.parent_path().string(), ec.message()));
      }
      if (absl::Status s = WriteCalibrationFile(calibration, path); !s.ok()) return s;
    }
    summary.calibration = path;
    calibration_ref = CalibrationSummary(path, calibration);
  }

  std::unique_ptr<ResultsWriter> writer;
  if (resuming) {
    absl::StatusOr<std::unique_ptr<ResultsWriter>> w =
        ResultsWriter::Append(summary.results);
    if (!w.ok()) return w.status();
    writer = *std::move(w);
  } else {
    RunHeader header;
    header.config = config_json;
    header.capabilities = CapabilitiesToJson(*caps);
    header.calibration = calibration_ref;
    header.tool_version = VQAPROBE_VERSION;
    header.created_at = NowUtc();
    absl::StatusOr<std::unique_ptr<ResultsWriter>> w =
        ResultsWriter::Create(summary.results, header);
    if (!w.ok()) return w.status();
    writer = *std::move(w);
  }

  std::vector<const Sample*> pending;
  for (const Sample& s : dataset->samples) {
    if (done.contains(s.id)) {
      ++summary.skipped;
    } else {
      pending.push_back(&s);
    }
  }
  const int64_t total_pending = static_cast<int64_t>(pending.size());
  if (config.limit && *config.limit < total_pending) pending.resize(*config.limit);
  summary.pending = total_pending - static_cast<int64_t>(pending.size());

  std::unique_ptr<SerializedAdapter> serialized;
  Adapter* eval_adapter = &adapter;
  if (!caps->concurrent && config.parallelism > 1) {
    serialized = std::make_unique<SerializedAdapter>(adapter);
    eval_adapter = serialized.get();
  }
  const sear::PosTagger tagger;
  const DatasetManifest& ds = *dataset;
  auto evaluate = [&](const Sample& sample) {
    SampleContext ctx;
    ctx.adapter = eval_adapter;
    ctx.capabilities = &*caps;
    ctx.dataset = &ds;
    ctx.sample = &sample;
    ctx.load_image = [&ds](const Sample& s) { return ReadFileBytes(ds.ImagePath(s)); };
    ctx.tagger = &tagger;
    ctx.calibration = &calibration;
    ctx.run_seed = config.seed;
    ctx.options = config.metrics;
    return EvaluateSample(ctx);
  };

  // Workers evaluate out of order; records are committed in manifest order.
  const size_t n = pending.size();
  const size_t window = static_cast<size_t>(config.parallelism) * 4;
  std::vector<std::optional<SampleMetrics>> slots(n);
  std::mutex mu;
  std::condition_variable cv;
  size_t next = 0;
  size_t committed = 0;
  bool stop = false;

  auto worker = [&] {
    for (;;) {
      size_t i;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next >= n || next < committed + window; });
        if (stop || next >= n) return;
        i = next++;
      }
      SampleMetrics m = evaluate(*pending[i]);
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(m);
      }
      cv.notify_all();
    }
  };
  std::vector<std::jthread> workers;
  const size_t n_workers = std::min(n, static_cast<size_t>(config.parallelism));
  for (size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);

  absl::Status write_status;
  for (size_t i = 0; i < n; ++i) {
    SampleMetrics m;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[i].has_value(); });
      m = *std::move(slots[i]);
      slots[i].reset();
    }
    write_status = writer->Write(m);
    {
      std::lock_guard lock(mu);
      committed = i + 1;
      if (!write_status.ok()) stop = true;
    }
    cv.notify_all();
    if (!write_status.ok()) break;
    ++summary.evaluated;
    if (m.error) ++summary.errored;
    if (progress) progress(summary.evaluated, static_cast<int64_t>(n));
  }
  if (!write_status.ok()) {
    // Unblock workers waiting on slots that will never be committed.
    workers.clear();
    return write_status;
  }
  return summary;
}

}  // namespace vqaprobe
