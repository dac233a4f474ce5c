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

#ifndef VQAPROBE_ADAPTER_ADAPTER_H_
#define VQAPROBE_ADAPTER_ADAPTER_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "vqaprobe/adapter/protocol.h"
#include "vqaprobe/core/matrix.h"

namespace vqaprobe {

// A model behind the adapter protocol. Implementations: HttpAdapter (remote),
// the built-in stubs, and decorators. Failures carry an AdapterErrorCode.
class Adapter {
 public:
  virtual ~Adapter() = default;

  virtual absl::StatusOr<ModelCapabilities> GetCapabilities() = 0;
  virtual absl::StatusOr<PredictResponse> Predict(
      const PredictRequest& request) = 0;
  // `image` is PNG bytes.
  virtual absl::StatusOr<FeatureMatrix> ExtractImageFeatures(
      std::string_view image) = 0;
  virtual absl::StatusOr<EmbeddingMatrix> ExtractQuestionEmbedding(
      std::string_view question) = 0;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_ADAPTER_H_
