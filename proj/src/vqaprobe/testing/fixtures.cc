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

#include "vqaprobe/testing/fixtures.h"

#include <fstream>

#include "fmt/format.h"

namespace vqaprobe::testing {
namespace {

struct FixtureRow {
  const char* question;
  // answer -> number of annotators (of 10)
  std::map<std::string, int64_t> counts;
};

const std::vector<FixtureRow>& Rows() {
  static const auto* rows = new std::vector<FixtureRow>{
      {"What color is the car?", {{"red", 8}, {"orange", 2}}},
      {"What is the man holding?", {{"umbrella", 6}, {"bag", 4}}},
      {"Where is the dog?", {{"on the grass", 3}, {"outside", 5}, {"park", 2}}},
      {"Is the cat black?", {{"yes", 10}}},
      {"How many people are in the picture?", {{"2", 5}, {"3", 4}, {"4", 1}}},
      {"What sport is being played?", {{"tennis", 10}}},
      {"Who is holding the umbrella?", {{"woman", 7}, {"girl", 3}}},
      {"What is on the table?", {{"pizza", 9}, {"food", 1}}},
      {"Is it raining?", {{"no", 6}, {"yes", 4}}},
      {"What color are the flowers?", {{"yellow", 2}, {"white", 8}}},
      {"Where does the woman sit?", {{"bench", 10}}},
      {"What animal is this?", {{"giraffe", 10}}},
      {"Is the light red or green?", {{"red", 1}, {"green", 9}}},
      {"How is the weather?", {{"sunny", 6}, {"clear", 4}}},
      {"What is the name of the street?", {{"main", 5}, {"main st", 5}}},
      {"Does the bus have its lights on?", {{"yes", 3}, {"no", 7}}},
      {"What room is this?", {{"kitchen", 10}}},
      {"Why is the boy smiling?", {{"happy", 4}, {"playing", 3}, {"yes", 3}}},
      {"What food is on the plate?", {{"sandwich", 7}, {"bread", 3}}},
      {"Are there any clouds in the sky?", {{"yes", 9}, {"no", 1}}},
  };
  return *rows;
}

}  // namespace

const std::vector<std::string>& FixtureQuestions() {
  static const auto* questions = [] {
    auto* out = new std::vector<std::string>;
    for (const FixtureRow& r : Rows()) out->push_back(r.question);
    return out;
  }();
  return *questions;
}

Image FixtureImage(int index) {
  Image image(16, 16, 3);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int v = (x * (index + 3) + y * (2 * index + 1) + c * 40 +
                       index * 17) % 256;
        image.at(x, y, c) = static_cast<float>(v / 255.0);
      }
    }
  }
  return image;
}

absl::StatusOr<DatasetManifest> WriteFixtureDataset(
    const std::filesystem::path& dir, const std::string& name, int n) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "images", ec);
  if (ec) {
    return absl::InternalError(
        fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  DatasetManifest manifest;
  manifest.name = name;
  manifest.source_split = "synthetic";
  manifest.image_root = dir;
  const std::vector<FixtureRow>& rows = Rows();
  for (int i = 0; i < n; ++i) {
    const FixtureRow& row = rows[i % rows.size()];
    Sample s;
    s.id = fmt::format("{}-{:04d}", name, i);
    s.image_ref = fmt::format("images/{}.png", s.id);
    s.question = i < static_cast<int>(rows.size())
                     ? row.question
                     : fmt::format("{} ({})", row.question, i);
    s.answers = VqaAnswerScores(row.counts);
    absl::StatusOr<std::string> png = EncodePng(FixtureImage(i));
    if (!png.ok()) return png.status();
    std::ofstream out(dir / s.image_ref, std::ios::binary);
    out << *png;
    if (!out) {
      return absl::InternalError(fmt::format("cannot write {}", s.image_ref));
    }
    manifest.samples.push_back(std::move(s));
  }
  const std::filesystem::path path = dir / (name + ".json");
  if (absl::Status s = WriteManifest(manifest, path); !s.ok()) return s;
  return LoadManifest(path);
}

absl::StatusOr<std::string> LoadSampleImage(const DatasetManifest& dataset,
                                            const Sample& sample) {
  return ReadFileBytes(dataset.ImagePath(sample));
}

}  // namespace vqaprobe::testing
