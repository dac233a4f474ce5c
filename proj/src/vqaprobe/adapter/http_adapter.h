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

#ifndef VQAPROBE_ADAPTER_HTTP_ADAPTER_H_
#define VQAPROBE_ADAPTER_HTTP_ADAPTER_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vqaprobe/adapter/adapter.h"

namespace vqaprobe {

struct HttpAdapterOptions {
  std::chrono::milliseconds timeout{60'000};
  // Extra attempts after a transport failure or a retryable 5xx.
  int retries = 1;
};

// Client side of the wire protocol. Opens a connection per request, so one
// instance may be shared between threads.
class HttpAdapter : public Adapter {
 public:
  // `base_url` like "http://127.0.0.1:8000".
  explicit HttpAdapter(std::string base_url, HttpAdapterOptions options = {});

  absl::StatusOr<ModelCapabilities> GetCapabilities() override;
  absl::StatusOr<PredictResponse> Predict(const PredictRequest& request) override;
  absl::StatusOr<FeatureMatrix> ExtractImageFeatures(
      std::string_view image) override;
  absl::StatusOr<EmbeddingMatrix> ExtractQuestionEmbedding(
      std::string_view question) override;

  const std::string& base_url() const { return base_url_; }

 private:
  absl::StatusOr<nlohmann::json> Call(const std::string& path,
                                      const std::optional<nlohmann::json>& body);

  std::string base_url_;
  HttpAdapterOptions options_;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_HTTP_ADAPTER_H_
