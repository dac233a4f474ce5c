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

#include "vqaprobe/adapter/protocol.h"

#include <cmath>

#include "absl/strings/escaping.h"
#include "fmt/format.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

constexpr double kProbSumSlack = 1e-6;

absl::StatusOr<std::optional<std::string>> OptionalString(const json& j,
                                                          const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::optional<std::string>();
  if (!it->is_string()) {
    return absl::InvalidArgumentError(fmt::format("\"{}\" must be a string", key));
  }
  return std::optional<std::string>(it->get<std::string>());
}

}  // namespace

std::string_view CapabilityName(Capability c) {
  switch (c) {
    case Capability::kRawPredict:
      return "raw_predict";
    case Capability::kImageFeatures:
      return "image_features";
    case Capability::kQuestionEmbedding:
      return "question_embedding";
    case Capability::kPredictComposed:
      return "predict_composed";
    case Capability::kDropout:
      return "dropout";
  }
  return "unknown";
}

std::optional<Capability> ParseCapability(std::string_view name) {
  for (Capability c : kAllCapabilities) {
    if (CapabilityName(c) == name) return c;
  }
  return std::nullopt;
}

absl::Status ModelCapabilities::Validate() const {
  if (model_name.empty()) {
    return absl::InvalidArgumentError("model_name is empty");
  }
  if (model_name.find_first_of("/\\") != std::string::npos ||
      model_name == "." || model_name == "..") {
    return absl::InvalidArgumentError(
        fmt::format("model_name \"{}\" is not usable as a directory name",
                    model_name));
  }
  if (!Has(Capability::kRawPredict)) {
    return absl::InvalidArgumentError("raw_predict must always be supported");
  }
  if (Has(Capability::kPredictComposed) &&
      !Has(Capability::kImageFeatures) &&
      !Has(Capability::kQuestionEmbedding)) {
    return absl::InvalidArgumentError(
        "predict_composed requires image_features or question_embedding");
  }
  if (parameter_count && *parameter_count < 0) {
    return absl::InvalidArgumentError("parameter_count is negative");
  }
  return absl::OkStatus();
}

absl::Status PredictResponse::Validate() const {
  if (topk.empty()) return absl::InvalidArgumentError("topk is empty");
  double sum = 0;
  for (size_t i = 0; i < topk.size(); ++i) {
    const double p = topk[i].prob;
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          fmt::format("topk[{}] probability {} outside [0,1]", i, p));
    }
    if (i > 0 && p > topk[i - 1].prob) {
      return absl::InvalidArgumentError(
          fmt::format("topk not in descending order at position {}", i));
    }
    sum += p;
  }
  if (sum > 1.0 + kProbSumSlack) {
    return absl::InvalidArgumentError(
        fmt::format("topk probabilities sum to {}", sum));
  }
  return absl::OkStatus();
}

absl::Status PredictRequest::Validate() const {
  if (image.has_value() == features.has_value()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        "exactly one of image and features is required");
  }
  if (question.has_value() == embedding.has_value()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        "exactly one of question and embedding is required");
  }
  if (top_k < 1) {
    return AdapterError(AdapterErrorCode::kBadRequest, "top_k must be >= 1");
  }
  if (features) {
    if (absl::Status s = features->Validate(); !s.ok()) {
      return AdapterError(AdapterErrorCode::kBadRequest, std::string(s.message()));
    }
  }
  if (embedding) {
    if (absl::Status s = embedding->Validate(); !s.ok()) {
      return AdapterError(AdapterErrorCode::kBadRequest, std::string(s.message()));
    }
  }
  return absl::OkStatus();
}

std::string_view AdapterErrorCodeName(AdapterErrorCode code) {
  switch (code) {
    case AdapterErrorCode::kBadRequest:
      return "bad_request";
    case AdapterErrorCode::kCapabilityMissing:
      return "capability_missing";
    case AdapterErrorCode::kShapeMismatch:
      return "shape_mismatch";
    case AdapterErrorCode::kProtocolError:
      return "protocol_error";
    case AdapterErrorCode::kUnavailable:
      return "unavailable";
    case AdapterErrorCode::kInternal:
      return "internal";
  }
  return "internal";
}

std::optional<AdapterErrorCode> ParseAdapterErrorCode(std::string_view name) {
  for (AdapterErrorCode code :
       {AdapterErrorCode::kBadRequest, AdapterErrorCode::kCapabilityMissing,
        AdapterErrorCode::kShapeMismatch, AdapterErrorCode::kProtocolError,
        AdapterErrorCode::kUnavailable, AdapterErrorCode::kInternal}) {
    if (AdapterErrorCodeName(code) == name) return code;
  }
  return std::nullopt;
}

int HttpStatusFor(AdapterErrorCode code) {
  switch (code) {
    case AdapterErrorCode::kBadRequest:
      return 400;
    case AdapterErrorCode::kCapabilityMissing:
      return 501;
    case AdapterErrorCode::kShapeMismatch:
      return 422;
    case AdapterErrorCode::kProtocolError:
      return 502;
    case AdapterErrorCode::kUnavailable:
      return 503;
    case AdapterErrorCode::kInternal:
      return 500;
  }
  return 500;
}

absl::Status AdapterError(AdapterErrorCode code, std::string_view message) {
  const std::string text =
      fmt::format("{}: {}", AdapterErrorCodeName(code), message);
  switch (code) {
    case AdapterErrorCode::kBadRequest:
      return absl::InvalidArgumentError(text);
    case AdapterErrorCode::kCapabilityMissing:
      return absl::UnimplementedError(text);
    case AdapterErrorCode::kShapeMismatch:
      return absl::OutOfRangeError(text);
    case AdapterErrorCode::kProtocolError:
      return absl::DataLossError(text);
    case AdapterErrorCode::kUnavailable:
      return absl::UnavailableError(text);
    case AdapterErrorCode::kInternal:
      return absl::InternalError(text);
  }
  return absl::InternalError(text);
}

AdapterErrorCode AdapterErrorCodeOf(const absl::Status& status) {
  const std::string message(status.message());
  const size_t colon = message.find(':');
  if (colon != std::string::npos) {
    if (auto code = ParseAdapterErrorCode(message.substr(0, colon))) {
      return *code;
    }
  }
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return AdapterErrorCode::kBadRequest;
    case absl::StatusCode::kUnimplemented:
      return AdapterErrorCode::kCapabilityMissing;
    case absl::StatusCode::kOutOfRange:
      return AdapterErrorCode::kShapeMismatch;
    case absl::StatusCode::kDataLoss:
      return AdapterErrorCode::kProtocolError;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDeadlineExceeded:
      return AdapterErrorCode::kUnavailable;
    default:
      return AdapterErrorCode::kInternal;
  }
}

json ErrorToJson(const absl::Status& status) {
  const AdapterErrorCode code = AdapterErrorCodeOf(status);
  std::string message(status.message());
  const std::string prefix = fmt::format("{}: ", AdapterErrorCodeName(code));
  if (message.starts_with(prefix)) message.erase(0, prefix.size());
  return {{"error", AdapterErrorCodeName(code)}, {"message", message}};
}

json CapabilitiesToJson(const ModelCapabilities& caps) {
  json supports = json::array();
  for (Capability c : kAllCapabilities) {
    if (caps.Has(c)) supports.push_back(CapabilityName(c));
  }
  json j = {{"model_name", caps.model_name},
            {"parameter_count", nullptr},
            {"supports", supports},
            {"concurrent", caps.concurrent}};
  if (caps.parameter_count) j["parameter_count"] = *caps.parameter_count;
  return j;
}

absl::StatusOr<ModelCapabilities> CapabilitiesFromJson(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("capabilities must be an object");
  }
  ModelCapabilities caps;
  auto name = j.find("model_name");
  if (name == j.end() || !name->is_string()) {
    return absl::InvalidArgumentError("capabilities.model_name missing");
  }
  caps.model_name = name->get<std::string>();
  if (auto it = j.find("parameter_count"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      return absl::InvalidArgumentError("parameter_count must be an integer");
    }
    caps.parameter_count = it->get<int64_t>();
  }
  auto supports = j.find("supports");
  if (supports == j.end() || !supports->is_array()) {
    return absl::InvalidArgumentError("capabilities.supports missing");
  }
  for (const json& s : *supports) {
    if (!s.is_string()) {
      return absl::InvalidArgumentError("supports entries must be strings");
    }
    // Unknown capabilities from newer adapters are ignored.
    if (auto c = ParseCapability(s.get<std::string>())) caps.supports.insert(*c);
  }
  if (auto it = j.find("concurrent"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      return absl::InvalidArgumentError("concurrent must be a boolean");
    }
    caps.concurrent = it->get<bool>();
  }
  if (absl::Status s = caps.Validate(); !s.ok()) return s;
  return caps;
}

json ResponseToJson(const PredictResponse& response) {
  json topk = json::array();
  for (const ScoredAnswer& a : response.topk) {
    topk.push_back({{"answer", a.answer}, {"prob", a.prob}});
  }
  return {{"topk", topk}};
}

absl::StatusOr<PredictResponse> ResponseFromJson(const json& j) {
  if (!j.is_object() || !j.contains("topk") || !j["topk"].is_array()) {
    return absl::InvalidArgumentError("response needs a \"topk\" array");
  }
  PredictResponse response;
  for (const json& entry : j["topk"]) {
    if (!entry.is_object() || !entry.contains("answer") ||
        !entry["answer"].is_string() || !entry.contains("prob") ||
        !entry["prob"].is_number()) {
      return absl::InvalidArgumentError(
          "topk entries need string \"answer\" and numeric \"prob\"");
    }
    response.topk.push_back(
        {entry["answer"].get<std::string>(), entry["prob"].get<double>()});
  }
  return response;
}

json RequestToJson(const PredictRequest& request) {
  json j = json::object();
  if (request.image) {
    std::string encoded;
    absl::Base64Escape(*request.image, &encoded);
    j["image_b64"] = std::move(encoded);
  }
  if (request.features) j["features"] = MatrixToJson(*request.features);
  if (request.question) j["question"] = *request.question;
  if (request.embedding) j["embedding"] = MatrixToJson(*request.embedding);
  j["dropout"] = request.dropout;
  j["top_k"] = request.top_k;
  if (request.seed) j["seed"] = *request.seed;
  return j;
}

absl::StatusOr<PredictRequest> RequestFromJson(const json& j) {
  if (!j.is_object()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        "request body must be a JSON object");
  }
  PredictRequest request;
  absl::StatusOr<std::optional<std::string>> image_b64 =
      OptionalString(j, "image_b64");
  if (!image_b64.ok()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        std::string(image_b64.status().message()));
  }
  if (*image_b64) {
    std::string bytes;
    if (!absl::Base64Unescape(**image_b64, &bytes)) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          "image_b64 is not valid base64");
    }
    request.image = std::move(bytes);
  }
  absl::StatusOr<std::optional<std::string>> question =
      OptionalString(j, "question");
  if (!question.ok()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        std::string(question.status().message()));
  }
  request.question = *std::move(question);
  if (auto it = j.find("features"); it != j.end() && !it->is_null()) {
    auto m = MatrixFromJson<ImageFeatureTag>(*it);
    if (!m.ok()) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          fmt::format("features: {}", std::string(m.status().message())));
    }
    request.features = *std::move(m);
  }
  if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
    auto m = MatrixFromJson<QuestionEmbeddingTag>(*it);
    if (!m.ok()) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          fmt::format("embedding: {}", std::string(m.status().message())));
    }
    request.embedding = *std::move(m);
  }
  if (auto it = j.find("dropout"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          "dropout must be a boolean");
    }
    request.dropout = it->get<bool>();
  }
  if (auto it = j.find("top_k"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          "top_k must be an integer");
    }
    request.top_k = it->get<int>();
  }
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      return AdapterError(AdapterErrorCode::kBadRequest,
                          "seed must be a non-negative integer");
    }
    request.seed = it->get<uint64_t>();
  }
  if (absl::Status s = request.Validate(); !s.ok()) return s;
  return request;
}

}  // namespace vqaprobe
