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

#ifndef VQAPROBE_ADAPTER_DECORATORS_H_
#define VQAPROBE_ADAPTER_DECORATORS_H_

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vqaprobe/adapter/adapter.h"

namespace vqaprobe {

struct RequestLogEntry {
  // "capabilities", "predict", "image-features" or "question-embedding".
  std::string endpoint;
  // Capability the request relies on; empty for capabilities.
  std::optional<Capability> capability;
  bool dropout = false;
  // Question text of raw-question predictions and embedding requests.
  std::optional<std::string> question;
};

// Forwards to `inner` and keeps a log of every request.
class RecordingAdapter : public Adapter {
 public:
  explicit RecordingAdapter(Adapter& inner) : inner_(inner) {}

  absl::StatusOr<ModelCapabilities> GetCapabilities() override;
  absl::StatusOr<PredictResponse> Predict(const PredictRequest& request) override;
  absl::StatusOr<FeatureMatrix> ExtractImageFeatures(
      std::string_view image) override;
  absl::StatusOr<EmbeddingMatrix> ExtractQuestionEmbedding(
      std::string_view question) override;

  std::vector<RequestLogEntry> log() const;
  size_t size() const;
  void Clear();

 private:
  void Append(RequestLogEntry entry);

  Adapter& inner_;
  mutable std::mutex mu_;
  std::vector<RequestLogEntry> log_;
};

// One request at a time, for adapters that do not declare concurrent.
class SerializedAdapter : public Adapter {
 public:
  explicit SerializedAdapter(Adapter& inner) : inner_(inner) {}

  absl::StatusOr<ModelCapabilities> GetCapabilities() override;
  absl::StatusOr<PredictResponse> Predict(const PredictRequest& request) override;
  absl::StatusOr<FeatureMatrix> ExtractImageFeatures(
      std::string_view image) override;
  absl::StatusOr<EmbeddingMatrix> ExtractQuestionEmbedding(
      std::string_view question) override;

 private:
  Adapter& inner_;
  std::mutex mu_;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_DECORATORS_H_
