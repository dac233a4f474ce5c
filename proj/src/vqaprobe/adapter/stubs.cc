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

#include "vqaprobe/adapter/stubs.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "fmt/format.h"
#include "vqaprobe/core/random.h"
#include "vqaprobe/core/text.h"

namespace vqaprobe {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

template <typename Tag>
uint64_t HashMatrix(const DenseMatrix<Tag>& m) {
  std::string bytes = fmt::format("{}x{}:", m.rows(), m.cols());
  for (double v : m.values()) {
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof(double));
    bytes.append(buf, sizeof(double));
  }
  return Fnv1a64(bytes);
}

int ColorChannels(const Image& image) {
  return image.channels == 2 || image.channels == 4 ? image.channels - 1
                                                    : image.channels;
}

double Gray(const Image& image, int x, int y) {
  const int colors = ColorChannels(image);
  double sum = 0;
  for (int c = 0; c < colors; ++c) sum += image.at(x, y, c);
  return sum / colors;
}

double MeanIntensity(const Image& image) {
  double sum = 0;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) sum += Gray(image, x, y);
  }
  return sum / static_cast<double>(image.pixel_count());
}

std::pair<int, int> CellSpan(int g, int extent) {
  const int begin = g * extent / 8;
  const int end = std::max(begin + 1, (g + 1) * extent / 8);
  return {begin, end};
}

PredictResponse Truncate(PredictResponse response, int top_k) {
  if (static_cast<int>(response.topk.size()) > top_k) {
    response.topk.resize(top_k);
  }
  return response;
}

}  // namespace

std::string_view StubKindName(StubKind kind) {
  switch (kind) {
    case StubKind::kConstant:
      return "constant";
    case StubKind::kQuestionOnly:
      return "question_only";
    case StubKind::kImageOnly:
      return "image_only";
    case StubKind::kDropoutSim:
      return "dropout_sim";
    case StubKind::kThreshold:
      return "threshold";
  }
  return "constant";
}

std::optional<StubKind> ParseStubKind(std::string_view name) {
  for (StubKind kind : {StubKind::kConstant, StubKind::kQuestionOnly,
                        StubKind::kImageOnly, StubKind::kDropoutSim,
                        StubKind::kThreshold}) {
    if (StubKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view DropoutModeName(DropoutMode mode) {
  switch (mode) {
    case DropoutMode::kNoisy:
      return "noisy";
    case DropoutMode::kDegenerate:
      return "degenerate";
    case DropoutMode::kAlternating:
      return "alternating";
  }
  return "noisy";
}

std::optional<DropoutMode> ParseDropoutMode(std::string_view name) {
  for (DropoutMode mode : {DropoutMode::kNoisy, DropoutMode::kDegenerate,
                           DropoutMode::kAlternating}) {
    if (DropoutModeName(mode) == name) return mode;
  }
  return std::nullopt;
}

FeatureMatrix StubImageFeatures(const Image& image) {
  FeatureMatrix m(kStubFeatureRows, kStubFeatureDim);
  for (int cy = 0; cy < 8; ++cy) {
    const auto [y0, y1] = CellSpan(cy, image.height);
    for (int cx = 0; cx < 8; ++cx) {
      const auto [x0, x1] = CellSpan(cx, image.width);
      double sum = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) sum += Gray(image, x, y);
      }
      const int row = 2 * (cy / 4) + cx / 4;
      const int col = 4 * (cy % 4) + cx % 4;
      m(row, col) = sum / ((y1 - y0) * (x1 - x0));
    }
  }
  return m;
}

absl::StatusOr<EmbeddingMatrix> StubQuestionEmbedding(
    std::string_view question) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : question) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.empty()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        "question has no tokens; embedding needs T >= 1");
  }
  EmbeddingMatrix m(static_cast<int>(tokens.size()), kStubEmbeddingDim);
  for (size_t t = 0; t < tokens.size(); ++t) {
    const uint64_t s = Fnv1a64(tokens[t]);
    for (int k = 0; k < kStubEmbeddingDim; ++k) {
      const uint64_t bits = Mix64(s + (k + 1) * kGolden) >> 11;
      m(static_cast<int>(t), k) = 2.0 * std::ldexp(static_cast<double>(bits), -53) - 1.0;
    }
  }
  return m;
}

StubAdapter::StubAdapter(StubOptions options) : options_(std::move(options)) {
  if (options_.model_name.empty()) {
    options_.model_name = fmt::format("stub-{}", StubKindName(options_.kind));
  }
}

std::unique_ptr<StubAdapter> MakeStub(StubKind kind) {
  StubOptions options;
  options.kind = kind;
  return std::make_unique<StubAdapter>(std::move(options));
}

absl::StatusOr<ModelCapabilities> StubAdapter::GetCapabilities() {
  ModelCapabilities caps;
  caps.model_name = options_.model_name;
  caps.parameter_count = options_.parameter_count;
  caps.supports = options_.supports;
  caps.concurrent = true;
  if (absl::Status s = caps.Validate(); !s.ok()) return s;
  return caps;
}

absl::Status StubAdapter::CheckCapability(Capability c) const {
  if (options_.supports.contains(c)) return absl::OkStatus();
  return AdapterError(AdapterErrorCode::kCapabilityMissing,
                      fmt::format("{} is not supported by {}",
                                  CapabilityName(c), options_.model_name));
}

absl::StatusOr<std::string> StubAdapter::QuestionKey(
    const PredictRequest& request) const {
  if (request.question) return "a" + Hex64(Fnv1a64(*request.question));
  return "e" + Hex64(HashMatrix(*request.embedding));
}

absl::StatusOr<std::string> StubAdapter::ImageKey(
    const PredictRequest& request) const {
  if (request.features) return "f" + Hex64(HashMatrix(*request.features));
  absl::StatusOr<Image> image = DecodePng(*request.image);
  if (!image.ok()) return "b" + Hex64(Fnv1a64(*request.image));
  std::string bytes = fmt::format("{}x{}x{}:", image->width, image->height,
                                  image->channels);
  for (float p : image->pixels) {
    bytes.push_back(static_cast<char>(std::lround(p * 255.0f)));
  }
  return "i" + Hex64(Fnv1a64(bytes));
}

absl::StatusOr<double> StubAdapter::ThresholdSignal(
    const PredictRequest& request) const {
  if (request.embedding) return (*request.embedding)(0, 0);
  if (request.features) return (*request.features)(0, 0);
  absl::StatusOr<Image> image = DecodePng(*request.image);
  if (!image.ok()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        fmt::format("image: {}",
                                    std::string(image.status().message())));
  }
  return MeanIntensity(*image);
}

PredictResponse StubAdapter::Dropout(const std::string& answer,
                                     const PredictRequest& request) {
  switch (options_.dropout_mode) {
    case DropoutMode::kDegenerate:
      return {{{"yes", 1.0}}};
    case DropoutMode::kAlternating: {
      const uint64_t n = dropout_calls_.fetch_add(1);
      return {{{n % 2 == 0 ? "yes" : "no", 1.0}}};
    }
    case DropoutMode::kNoisy:
      break;
  }
  Rng rng(request.seed.value_or(Fnv1a64(answer)));
  std::vector<ScoredAnswer> topk = {{answer, 0.6}, {"yes", 0.25}, {"no", 0.15}};
  double total = 0;
  for (ScoredAnswer& a : topk) {
    a.prob *= std::exp(rng.Normal(0.0, 0.75));
    total += a.prob;
  }
  for (ScoredAnswer& a : topk) a.prob /= total;
  std::stable_sort(topk.begin(), topk.end(),
                   [](const ScoredAnswer& a, const ScoredAnswer& b) {
                     return a.prob > b.prob;
                   });
  return {topk};
}

absl::StatusOr<PredictResponse> StubAdapter::Predict(
    const PredictRequest& request) {
  if (absl::Status s = request.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckCapability(request.composed()
                                           ? Capability::kPredictComposed
                                           : Capability::kRawPredict);
      !s.ok()) {
    return s;
  }
  if (request.dropout) {
    if (absl::Status s = CheckCapability(Capability::kDropout); !s.ok()) {
      return s;
    }
  }
  if (request.features && request.features->cols() != kStubFeatureDim) {
    return AdapterError(AdapterErrorCode::kShapeMismatch,
                        fmt::format("features have D={}, expected {}",
                                    request.features->cols(), kStubFeatureDim));
  }
  if (request.embedding && request.embedding->cols() != kStubEmbeddingDim) {
    return AdapterError(
        AdapterErrorCode::kShapeMismatch,
        fmt::format("embedding has E={}, expected {}",
                    request.embedding->cols(), kStubEmbeddingDim));
  }

  switch (options_.kind) {
    case StubKind::kConstant:
      return PredictResponse{{{"yes", 1.0}}};
    case StubKind::kQuestionOnly: {
      absl::StatusOr<std::string> key = QuestionKey(request);
      if (!key.ok()) return key.status();
      return Truncate({{{*key, 0.7}, {"yes", 0.2}, {"no", 0.1}}},
                      request.top_k);
    }
    case StubKind::kImageOnly: {
      absl::StatusOr<std::string> key = ImageKey(request);
      if (!key.ok()) return key.status();
      return Truncate({{{*key, 0.8}, {"yes", 0.1}, {"no", 0.1}}},
                      request.top_k);
    }
    case StubKind::kDropoutSim: {
      absl::StatusOr<std::string> key = QuestionKey(request);
      if (!key.ok()) return key.status();
      if (request.dropout) return Truncate(Dropout(*key, request), request.top_k);
      if (options_.dropout_mode == DropoutMode::kNoisy) {
        return Truncate({{{*key, 0.6}, {"yes", 0.25}, {"no", 0.15}}},
                        request.top_k);
      }
      return PredictResponse{{{"yes", 1.0}}};
    }
    case StubKind::kThreshold: {
      absl::StatusOr<double> signal = ThresholdSignal(request);
      if (!signal.ok()) return signal.status();
      const bool bright = *signal >= options_.threshold;
      return Truncate({{{bright ? "bright" : "dark", 0.9},
                        {bright ? "dark" : "bright", 0.1}}},
                      request.top_k);
    }
  }
  return AdapterError(AdapterErrorCode::kInternal, "unknown stub kind");
}

absl::StatusOr<FeatureMatrix> StubAdapter::ExtractImageFeatures(
    std::string_view image) {
  if (absl::Status s = CheckCapability(Capability::kImageFeatures); !s.ok()) {
    return s;
  }
  absl::StatusOr<Image> decoded = DecodePng(image);
  if (!decoded.ok()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        fmt::format("image: {}",
                                    std::string(decoded.status().message())));
  }
  return StubImageFeatures(*decoded);
}

absl::StatusOr<EmbeddingMatrix> StubAdapter::ExtractQuestionEmbedding(
    std::string_view question) {
  if (absl::Status s = CheckCapability(Capability::kQuestionEmbedding);
      !s.ok()) {
    return s;
  }
  return StubQuestionEmbedding(question);
}

}  // namespace vqaprobe
