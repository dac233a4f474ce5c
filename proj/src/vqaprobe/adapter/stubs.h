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

#ifndef VQAPROBE_ADAPTER_STUBS_H_
#define VQAPROBE_ADAPTER_STUBS_H_

#include <atomic>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "vqaprobe/adapter/adapter.h"
#include "vqaprobe/core/image.h"

namespace vqaprobe {

// Deterministic models for tests and demos. All are safe to call
// concurrently and declare concurrent=true.
//
//   constant       ("yes", 1.0) for every input.
//   question_only  answer is a hash of the question text (or of the
//                  embedding values); images are ignored.
//   image_only     answer is a hash of the decoded 8-bit pixels (or of the
//                  feature values); questions are ignored.
//   dropout_sim    like question_only without dropout; with dropout the
//                  distribution is perturbed by a PRNG seeded from the
//                  request seed. See DropoutMode for the degenerate and
//                  alternating variants.
//   threshold      "bright"/"dark" by mean pixel intensity, feature(0,0) or
//                  embedding(0,0) against `threshold`.
enum class StubKind { kConstant, kQuestionOnly, kImageOnly, kDropoutSim, kThreshold };

std::string_view StubKindName(StubKind kind);
std::optional<StubKind> ParseStubKind(std::string_view name);

enum class DropoutMode {
  kNoisy,
  // Always ("yes", 1.0).
  kDegenerate,
  // Dropout calls alternate ("yes", 1.0), ("no", 1.0), ... in arrival order.
  kAlternating,
};

std::string_view DropoutModeName(DropoutMode mode);
std::optional<DropoutMode> ParseDropoutMode(std::string_view name);

struct StubOptions {
  StubKind kind = StubKind::kConstant;
  DropoutMode dropout_mode = DropoutMode::kNoisy;
  double threshold = 0.5;
  // Defaults to "stub-<kind>".
  std::string model_name;
  std::optional<int64_t> parameter_count;
  // Declared capabilities; requests needing anything else are refused with
  // capability_missing.
  std::set<Capability> supports = {std::begin(kAllCapabilities),
                                   std::end(kAllCapabilities)};
};

inline constexpr int kStubFeatureRows = 4;
inline constexpr int kStubFeatureDim = 16;
inline constexpr int kStubEmbeddingDim = 8;

// 4x16 block means: the image is split into an 8x8 grid of cells (cell g
// spans pixels [floor(g*W/8), floor((g+1)*W/8)), at least one pixel wide)
// and each cell is averaged over its pixels and color channels. Row r is the
// 2x2 quadrant (r = 2*qy + qx); column c is the cell within it
// (c = 4*(cy%4) + cx%4).
FeatureMatrix StubImageFeatures(const Image& image);

// One row per lowercase alphanumeric token. Row values for token t:
// s = Fnv1a64(t); v_k = 2 * (Mix64(s + (k+1) * 0x9e3779b97f4a7c15) >> 11)
// * 2^-53 - 1 for k in [0, 8).
absl::StatusOr<EmbeddingMatrix> StubQuestionEmbedding(std::string_view question);

class StubAdapter : public Adapter {
 public:
  explicit StubAdapter(StubOptions options);

  absl::StatusOr<ModelCapabilities> GetCapabilities() override;
  absl::StatusOr<PredictResponse> Predict(const PredictRequest& request) override;
  absl::StatusOr<FeatureMatrix> ExtractImageFeatures(
      std::string_view image) override;
  absl::StatusOr<EmbeddingMatrix> ExtractQuestionEmbedding(
      std::string_view question) override;

  const StubOptions& options() const { return options_; }

 private:
  absl::Status CheckCapability(Capability c) const;
  absl::StatusOr<std::string> QuestionKey(const PredictRequest& request) const;
  absl::StatusOr<std::string> ImageKey(const PredictRequest& request) const;
  absl::StatusOr<double> ThresholdSignal(const PredictRequest& request) const;
  PredictResponse Dropout(const std::string& answer,
                          const PredictRequest& request);

  StubOptions options_;
  std::atomic<uint64_t> dropout_calls_{0};
};

std::unique_ptr<StubAdapter> MakeStub(StubKind kind);

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_STUBS_H_
