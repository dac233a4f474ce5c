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

#include "vqaprobe/core/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fmt/format.h"

namespace vqaprobe {
namespace {

png_uint_32 FormatFor(int channels) {
  switch (channels) {
    case 1:
      return PNG_FORMAT_GRAY;
    case 2:
      return PNG_FORMAT_GA;
    case 3:
      return PNG_FORMAT_RGB;
    default:
      return PNG_FORMAT_RGBA;
  }
}

}  // namespace

absl::StatusOr<Image> DecodePng(std::string_view bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    return absl::InvalidArgumentError(
        fmt::format("not a decodable PNG: {}", png.message));
  }
  const int channels = static_cast<int>(PNG_IMAGE_SAMPLE_CHANNELS(png.format));
  png.format = FormatFor(channels);
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&png);
    return absl::InvalidArgumentError(
        fmt::format("PNG decode failed: {}", png.message));
  }
  Image image(static_cast<int>(png.width), static_cast<int>(png.height),
              channels);
  for (size_t i = 0; i < buffer.size(); ++i) {
    image.pixels[i] = static_cast<float>(buffer[i]) / 255.0f;
  }
  return image;
}

absl::StatusOr<std::string> EncodePng(const Image& image) {
  if (image.empty() || image.channels < 1 || image.channels > 4) {
    return absl::InvalidArgumentError("cannot encode an empty image");
  }
  std::vector<png_byte> raw(image.pixels.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const float v = std::clamp(image.pixels[i], 0.0f, 1.0f);
    raw[i] = static_cast<png_byte>(std::lround(v * 255.0f));
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = FormatFor(image.channels);

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, raw.data(), 0,
                                 nullptr)) {
    return absl::InternalError(
        fmt::format("PNG encode failed: {}", png.message));
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, raw.data(), 0,
                                 nullptr)) {
    return absl::InternalError(
        fmt::format("PNG encode failed: {}", png.message));
  }
  out.resize(size);
  return out;
}

absl::StatusOr<std::string> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(fmt::format("cannot open {}", path.string()));
  }
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace vqaprobe
