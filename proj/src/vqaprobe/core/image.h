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

#ifndef VQAPROBE_CORE_IMAGE_H_
#define VQAPROBE_CORE_IMAGE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace vqaprobe {

// Interleaved pixels normalized to [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c),
        pixels(static_cast<size_t>(w) * h * c, fill) {}

  bool empty() const { return pixels.empty(); }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  float& at(int x, int y, int c) {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Image&) const = default;
};

// PNG only. Gray, gray+alpha, RGB and RGBA inputs keep their channel count.
absl::StatusOr<Image> DecodePng(std::string_view bytes);
// Quantizes to 8 bits per channel.
absl::StatusOr<std::string> EncodePng(const Image& image);

absl::StatusOr<std::string> ReadFileBytes(const std::filesystem::path& path);

}  // namespace vqaprobe

#endif  // VQAPROBE_CORE_IMAGE_H_
