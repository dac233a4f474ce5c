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

#include "vqaprobe/adapter/decorators.h"

namespace vqaprobe {

void RecordingAdapter::Append(RequestLogEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  log_.push_back(std::move(entry));
}

std::vector<RequestLogEntry> RecordingAdapter::log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

size_t RecordingAdapter::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_.size();
}

void RecordingAdapter::Clear() {
  std::lock_guard<std::mutex> lock(mu_);
  log_.clear();
}

absl::StatusOr<ModelCapabilities> RecordingAdapter::GetCapabilities() {
  Append({"capabilities", std::nullopt, false, std::nullopt});
  return inner_.GetCapabilities();
}

absl::StatusOr<PredictResponse> RecordingAdapter::Predict(
    const PredictRequest& request) {
  Append({"predict",
          request.composed() ? Capability::kPredictComposed
                             : Capability::kRawPredict,
          request.dropout, request.question});
  return inner_.Predict(request);
}

absl::StatusOr<FeatureMatrix> RecordingAdapter::ExtractImageFeatures(
    std::string_view image) {
  Append({"image-features", Capability::kImageFeatures, false, std::nullopt});
  return inner_.ExtractImageFeatures(image);
}

absl::StatusOr<EmbeddingMatrix> RecordingAdapter::ExtractQuestionEmbedding(
    std::string_view question) {
  Append({"question-embedding", Capability::kQuestionEmbedding, false,
          std::string(question)});
  return inner_.ExtractQuestionEmbedding(question);
}

absl::StatusOr<ModelCapabilities> SerializedAdapter::GetCapabilities() {
  std::lock_guard<std::mutex> lock(mu_);
  return inner_.GetCapabilities();
}

absl::StatusOr<PredictResponse> SerializedAdapter::Predict(
    const PredictRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  return inner_.Predict(request);
}

absl::StatusOr<FeatureMatrix> SerializedAdapter::ExtractImageFeatures(
    std::string_view image) {
  std::lock_guard<std::mutex> lock(mu_);
  return inner_.ExtractImageFeatures(image);
}

absl::StatusOr<EmbeddingMatrix> SerializedAdapter::ExtractQuestionEmbedding(
    std::string_view question) {
  std::lock_guard<std::mutex> lock(mu_);
  return inner_.ExtractQuestionEmbedding(question);
}

}  // namespace vqaprobe
