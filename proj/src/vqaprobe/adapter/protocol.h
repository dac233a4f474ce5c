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

#ifndef VQAPROBE_ADAPTER_PROTOCOL_H_
#define VQAPROBE_ADAPTER_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "vqaprobe/core/matrix.h"

namespace vqaprobe {

enum class Capability {
  kRawPredict,
  kImageFeatures,
  kQuestionEmbedding,
  kPredictComposed,
  kDropout,
};

inline constexpr Capability kAllCapabilities[] = {
    Capability::kRawPredict, Capability::kImageFeatures,
    Capability::kQuestionEmbedding, Capability::kPredictComposed,
    Capability::kDropout};

std::string_view CapabilityName(Capability c);
std::optional<Capability> ParseCapability(std::string_view name);

struct ModelCapabilities {
  std::string model_name;
  std::optional<int64_t> parameter_count;
  std::set<Capability> supports;
  // The adapter accepts parallel requests.
  bool concurrent = false;

  bool Has(Capability c) const { return supports.contains(c); }
  absl::Status Validate() const;
  bool operator==(const ModelCapabilities&) const = default;
};

struct ScoredAnswer {
  std::string answer;
  double prob = 0;
  bool operator==(const ScoredAnswer&) const = default;
};

struct PredictResponse {
  std::vector<ScoredAnswer> topk;

  const std::string& top1() const { return topk.front().answer; }
  absl::Status Validate() const;
  bool operator==(const PredictResponse&) const = default;
};

inline constexpr int kDefaultTopK = 5;

struct PredictRequest {
  // PNG bytes, sent base64-encoded as `image_b64`.
  std::optional<std::string> image;
  std::optional<FeatureMatrix> features;
  std::optional<std::string> question;
  std::optional<EmbeddingMatrix> embedding;
  bool dropout = false;
  int top_k = kDefaultTopK;
  // Seed for the adapter's dropout randomness. Adapters that cannot seed
  // their dropout masks ignore it.
  std::optional<uint64_t> seed;

  // Exactly one image source and exactly one question source.
  absl::Status Validate() const;
  // Raw image + question text only needs raw_predict; anything else needs
  // predict_composed.
  bool composed() const { return features.has_value() || embedding.has_value(); }
  bool operator==(const PredictRequest&) const = default;
};

// Error codes carried on the wire as {"error": code, "message": text}.
enum class AdapterErrorCode {
  kBadRequest,
  kCapabilityMissing,
  kShapeMismatch,
  kProtocolError,
  kUnavailable,
  kInternal,
};

std::string_view AdapterErrorCodeName(AdapterErrorCode code);
std::optional<AdapterErrorCode> ParseAdapterErrorCode(std::string_view name);
int HttpStatusFor(AdapterErrorCode code);

// Status whose message starts with "<code>: ". The canonical absl code is
// chosen to match (kUnimplemented for capability_missing, ...).
absl::Status AdapterError(AdapterErrorCode code, std::string_view message);
// Recovers the adapter code of a status built by AdapterError; statuses from
// elsewhere map by canonical code.
AdapterErrorCode AdapterErrorCodeOf(const absl::Status& status);
nlohmann::json ErrorToJson(const absl::Status& status);

nlohmann::json CapabilitiesToJson(const ModelCapabilities& caps);
absl::StatusOr<ModelCapabilities> CapabilitiesFromJson(const nlohmann::json& j);

nlohmann::json ResponseToJson(const PredictResponse& response);
// Parses without checking ordering or probability ranges; call Validate.
absl::StatusOr<PredictResponse> ResponseFromJson(const nlohmann::json& j);

nlohmann::json RequestToJson(const PredictRequest& request);
absl::StatusOr<PredictRequest> RequestFromJson(const nlohmann::json& j);

template <typename Tag>
nlohmann::json MatrixToJson(const DenseMatrix<Tag>& m) {
  return m.ToRows();
}

template <typename Tag>
absl::StatusOr<DenseMatrix<Tag>> MatrixFromJson(const nlohmann::json& j) {
  if (!j.is_array()) return absl::InvalidArgumentError("matrix must be an array");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const nlohmann::json& row : j) {
    if (!row.is_array()) {
      return absl::InvalidArgumentError("matrix rows must be arrays");
    }
    std::vector<double>& out = rows.emplace_back();
    out.reserve(row.size());
    for (const nlohmann::json& v : row) {
      if (!v.is_number()) {
        return absl::InvalidArgumentError("matrix entries must be numbers");
      }
      out.push_back(v.get<double>());
    }
  }
  return DenseMatrix<Tag>::FromRows(rows);
}

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_PROTOCOL_H_
