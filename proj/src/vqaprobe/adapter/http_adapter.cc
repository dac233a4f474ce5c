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

#include "vqaprobe/adapter/http_adapter.h"

#include "absl/strings/escaping.h"
#include "fmt/format.h"
#include "httplib.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

bool Retryable(int status) {
  return status == 500 || status == 502 || status == 503 || status == 504;
}

absl::Status ErrorFromResponse(const httplib::Response& res) {
  json body = json::parse(res.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_object() && body.contains("error") && body["error"].is_string()) {
    const std::string message =
        body.contains("message") && body["message"].is_string()
            ? body["message"].get<std::string>()
            : std::string();
    const AdapterErrorCode code =
        ParseAdapterErrorCode(body["error"].get<std::string>())
            .value_or(AdapterErrorCode::kProtocolError);
    return AdapterError(code, message);
  }
  return AdapterError(AdapterErrorCode::kProtocolError,
                      fmt::format("HTTP {} without an error body", res.status));
}

absl::Status Protocol(std::string_view what, const absl::Status& status) {
  return AdapterError(AdapterErrorCode::kProtocolError,
                      fmt::format("{}: {}", what, std::string(status.message())));
}

}  // namespace

HttpAdapter::HttpAdapter(std::string base_url, HttpAdapterOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

absl::StatusOr<json> HttpAdapter::Call(const std::string& path,
                                       const std::optional<json>& body) {
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  absl::Status last;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    httplib::Client client(base_url_);
    if (!client.is_valid()) {
      return AdapterError(AdapterErrorCode::kUnavailable,
                          fmt::format("invalid adapter URL \"{}\"", base_url_));
    }
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    httplib::Result res = body ? client.Post(path, body->dump(), "application/json")
                               : client.Get(path);
    if (!res) {
      last = AdapterError(
          AdapterErrorCode::kUnavailable,
          fmt::format("{}{}: {}", base_url_, path, httplib::to_string(res.error())));
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last = ErrorFromResponse(*res);
      if (Retryable(res->status)) continue;
      return last;
    }
    json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      return AdapterError(AdapterErrorCode::kProtocolError,
                          fmt::format("{}: response is not JSON", path));
    }
    return parsed;
  }
  return last;
}

absl::StatusOr<ModelCapabilities> HttpAdapter::GetCapabilities() {
  absl::StatusOr<json> j = Call("/capabilities", std::nullopt);
  if (!j.ok()) return j.status();
  absl::StatusOr<ModelCapabilities> caps = CapabilitiesFromJson(*j);
  if (!caps.ok()) return Protocol("/capabilities", caps.status());
  return caps;
}

absl::StatusOr<PredictResponse> HttpAdapter::Predict(
    const PredictRequest& request) {
  if (absl::Status s = request.Validate(); !s.ok()) return s;
  absl::StatusOr<json> j = Call("/predict", RequestToJson(request));
  if (!j.ok()) return j.status();
  absl::StatusOr<PredictResponse> response = ResponseFromJson(*j);
  if (!response.ok()) return Protocol("/predict", response.status());
  if (absl::Status s = response->Validate(); !s.ok()) {
    return Protocol("/predict", s);
  }
  if (static_cast<int>(response->topk.size()) > request.top_k) {
    response->topk.resize(request.top_k);
  }
  return response;
}

absl::StatusOr<FeatureMatrix> HttpAdapter::ExtractImageFeatures(
    std::string_view image) {
  std::string encoded;
  absl::Base64Escape(absl::string_view(image.data(), image.size()), &encoded);
  absl::StatusOr<json> j = Call("/image-features", json{{"image_b64", encoded}});
  if (!j.ok()) return j.status();
  if (!j->is_object() || !j->contains("features")) {
    return AdapterError(AdapterErrorCode::kProtocolError,
                        "/image-features: missing \"features\"");
  }
  absl::StatusOr<FeatureMatrix> m = MatrixFromJson<ImageFeatureTag>((*j)["features"]);
  if (!m.ok()) return Protocol("/image-features", m.status());
  return m;
}

absl::StatusOr<EmbeddingMatrix> HttpAdapter::ExtractQuestionEmbedding(
    std::string_view question) {
  absl::StatusOr<json> j =
      Call("/question-embedding", json{{"question", std::string(question)}});
  if (!j.ok()) return j.status();
  if (!j->is_object() || !j->contains("embedding")) {
    return AdapterError(AdapterErrorCode::kProtocolError,
                        "/question-embedding: missing \"embedding\"");
  }
  absl::StatusOr<EmbeddingMatrix> m =
      MatrixFromJson<QuestionEmbeddingTag>((*j)["embedding"]);
  if (!m.ok()) return Protocol("/question-embedding", m.status());
  return m;
}

}  // namespace vqaprobe
