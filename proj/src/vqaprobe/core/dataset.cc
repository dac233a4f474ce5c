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

#include "vqaprobe/core/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "fmt/format.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/core/text.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

absl::Status SampleError(std::string_view id, std::string_view what) {
  return absl::InvalidArgumentError(
      fmt::format("sample \"{}\": {}", id, what));
}

absl::StatusOr<Sample> ParseSample(const json& j, size_t position) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError(
        fmt::format("samples[{}] is not an object", position));
  }
  Sample sample;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    return absl::InvalidArgumentError(
        fmt::format("samples[{}] has no string \"id\"", position));
  }
  sample.id = id->get<std::string>();

  auto image = j.find("image");
  if (image == j.end() || !image->is_string()) {
    return SampleError(sample.id, "missing string field \"image\"");
  }
  sample.image_ref = image->get<std::string>();
  auto question = j.find("question");
  if (question == j.end() || !question->is_string()) {
    return SampleError(sample.id, "missing string field \"question\"");
  }
  sample.question = question->get<std::string>();

  auto answers = j.find("answers");
  auto counts = j.find("human_counts");
  if (answers != j.end() && counts != j.end()) {
    return SampleError(sample.id,
                       "\"answers\" and \"human_counts\" are exclusive");
  }
  if (counts != j.end()) {
    if (!counts->is_object()) {
      return SampleError(sample.id, "\"human_counts\" must be an object");
    }
    std::map<std::string, int64_t> parsed;
    for (const auto& [answer, count] : counts->items()) {
      if (!count.is_number_integer() || count.get<int64_t>() < 0) {
        return SampleError(sample.id,
                           fmt::format("count for \"{}\" must be a non-negative integer",
                                       answer));
      }
      parsed[answer] = count.get<int64_t>();
    }
    sample.answers = VqaAnswerScores(parsed);
  } else if (answers != j.end()) {
    if (!answers->is_array()) {
      return SampleError(sample.id, "\"answers\" must be an array");
    }
    std::set<std::string> seen;
    for (const auto& a : *answers) {
      if (!a.is_object() || !a.contains("answer") ||
          !a["answer"].is_string() || !a.contains("score") ||
          !a["score"].is_number()) {
        return SampleError(sample.id,
                           "answers need string \"answer\" and number "
                           "\"score\"");
      }
      AnswerScore score{NormalizeAnswer(a["answer"].get<std::string>()),
                        a["score"].get<double>()};
      if (score.answer.empty()) {
        return SampleError(sample.id, "answer is empty after normalization");
      }
      if (!(score.score >= 0.0 && score.score <= 1.0)) {
        return SampleError(sample.id,
                           fmt::format("score for \"{}\" outside [0,1]",
                                       score.answer));
      }
      if (!seen.insert(score.answer).second) {
        return SampleError(sample.id, fmt::format("duplicate answer \"{}\"",
                                                  score.answer));
      }
      sample.answers.push_back(std::move(score));
    }
  } else {
    return SampleError(sample.id, "no \"answers\" or \"human_counts\"");
  }
  const bool any_positive =
      std::any_of(sample.answers.begin(), sample.answers.end(),
                  [](const AnswerScore& a) { return a.score > 0.0; });
  if (!any_positive) {
    return SampleError(sample.id, "needs at least one answer with score > 0");
  }
  return sample;
}

}  // namespace

std::vector<AnswerScore> VqaAnswerScores(
    const std::map<std::string, int64_t>& human_counts) {
  std::map<std::string, int64_t> merged;
  for (const auto& [answer, count] : human_counts) {
    std::string normalized = NormalizeAnswer(answer);
    if (normalized.empty() || count <= 0) continue;
    merged[normalized] += count;
  }
  std::vector<AnswerScore> out;
  out.reserve(merged.size());
  for (const auto& [answer, count] : merged) {
    out.push_back({answer, std::min(1.0, static_cast<double>(count) / 3.0)});
  }
  return out;
}

double ScoreOf(const Sample& sample, std::string_view answer) {
  const std::string normalized = NormalizeAnswer(answer);
  for (const AnswerScore& a : sample.answers) {
    if (a.answer == normalized) return a.score;
  }
  return 0.0;
}

absl::StatusOr<DatasetManifest> ParseManifest(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("manifest must be a JSON object");
  }
  DatasetManifest manifest;
  if (!j.contains("name") || !j["name"].is_string() ||
      j["name"].get<std::string>().empty()) {
    return absl::InvalidArgumentError("manifest needs a nonempty \"name\"");
  }
  manifest.name = j["name"].get<std::string>();
  manifest.source_split = j.value("source_split", "");
  if (!j.contains("samples") || !j["samples"].is_array()) {
    return absl::InvalidArgumentError("manifest needs a \"samples\" array");
  }
  const json& samples = j["samples"];
  if (samples.empty()) {
    return absl::InvalidArgumentError("manifest has no samples");
  }
  std::set<std::string> ids;
  for (size_t i = 0; i < samples.size(); ++i) {
    absl::StatusOr<Sample> sample = ParseSample(samples[i], i);
    if (!sample.ok()) return sample.status();
    if (!ids.insert(sample->id).second) {
      return SampleError(sample->id, "duplicate sample id");
    }
    manifest.samples.push_back(*std::move(sample));
  }
  return manifest;
}

absl::StatusOr<DatasetManifest> LoadManifest(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        fmt::format("cannot open manifest {}", path.string()));
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        fmt::format("manifest {} is not valid JSON", path.string()));
  }
  absl::StatusOr<DatasetManifest> manifest = ParseManifest(j);
  if (!manifest.ok()) {
    return absl::Status(manifest.status().code(),
                        fmt::format("{}: {}", path.string(),
                                    std::string(manifest.status().message())));
  }
  manifest->image_root = path.parent_path();
  return manifest;
}

json ManifestToJson(const DatasetManifest& manifest) {
  json samples = json::array();
  for (const Sample& s : manifest.samples) {
    json answers = json::array();
    for (const AnswerScore& a : s.answers) {
      answers.push_back({{"answer", a.answer}, {"score", a.score}});
    }
    samples.push_back({{"id", s.id},
                       {"image", s.image_ref},
                       {"question", s.question},
                       {"answers", std::move(answers)}});
  }
  return {{"name", manifest.name},
          {"source_split", manifest.source_split},
          {"samples", std::move(samples)}};
}

absl::Status WriteManifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(
        fmt::format("cannot write {}", path.string()));
  }
  out << ManifestToJson(manifest).dump(2) << '\n';
  return out ? absl::OkStatus()
             : absl::DataLossError(
                   fmt::format("short write to {}", path.string()));
}

DatasetManifest Subsample(const DatasetManifest& dataset,
                          const SubsampleSpec& spec) {
  const size_t n = dataset.samples.size();
  const size_t max_n = spec.max_n < 1 ? 1 : static_cast<size_t>(spec.max_n);
  if (n <= max_n) return dataset;

  Rng rng(spec.seed);
  std::vector<size_t> chosen = rng.SampleWithoutReplacement(n, max_n);
  std::sort(chosen.begin(), chosen.end());

  DatasetManifest out;
  out.name = dataset.name;
  out.source_split = dataset.source_split;
  out.image_root = dataset.image_root;
  out.samples.reserve(chosen.size());
  for (size_t i : chosen) out.samples.push_back(dataset.samples[i]);
  return out;
}

}  // namespace vqaprobe
