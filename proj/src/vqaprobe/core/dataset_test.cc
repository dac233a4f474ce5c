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

#include "vqaprobe/core/dataset.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "vqaprobe/core/random.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

std::filesystem::path WriteTemp(const std::string& name,
                                const std::string& content) {
  std::filesystem::path path =
      std::filesystem::path(::testing::TempDir()) / name;
  std::ofstream(path) << content;
  return path;
}

json ThreeSampleManifest() {
  return json::parse(R"({
    "name": "tiny", "source_split": "validation",
    "samples": [
      {"id": "s1", "image": "a.png", "question": "What color is the car?",
       "answers": [{"answer": " Red ", "score": 1.0}]},
      {"id": "s2", "image": "b.png", "question": "Is it raining?",
       "answers": [{"answer": "no", "score": 1.0},
                   {"answer": "yes", "score": 0.3}]},
      {"id": "s3", "image": "c.png", "question": "How many dogs?",
       "human_counts": {"2": 2, "two": 4, "3": 0}}
    ]})");
}

DatasetManifest Synthetic(int n) {
  DatasetManifest m;
  m.name = "synthetic";
  for (int i = 0; i < n; ++i) {
    m.samples.push_back({"s" + std::to_string(i), "img.png", "q?",
                         {{"yes", 1.0}}});
  }
  return m;
}

std::set<std::string> Ids(const DatasetManifest& m) {
  std::set<std::string> ids;
  for (const Sample& s : m.samples) ids.insert(s.id);
  return ids;
}

TEST(LoadManifestTest, LoadsFixtureAndNormalizesAnswers) {
  auto path = WriteTemp("three.json", ThreeSampleManifest().dump());
  absl::StatusOr<DatasetManifest> m = LoadManifest(path);
  ASSERT_TRUE(m.ok()) << m.status();
  EXPECT_EQ(m->name, "tiny");
  EXPECT_EQ(m->source_split, "validation");
  ASSERT_EQ(m->samples.size(), 3u);
  EXPECT_EQ(m->samples[0].answers[0].answer, "red");
  EXPECT_EQ(m->image_root, path.parent_path());
  EXPECT_EQ(m->ImagePath(m->samples[1]), path.parent_path() / "b.png");

  // human_counts convenience form goes through the VQA scoring rule.
  const auto& s3 = m->samples[2].answers;
  ASSERT_EQ(s3.size(), 2u);
  EXPECT_EQ(s3[0].answer, "2");
  EXPECT_DOUBLE_EQ(s3[0].score, 2.0 / 3.0);
  EXPECT_EQ(s3[1].answer, "two");
  EXPECT_DOUBLE_EQ(s3[1].score, 1.0);
}

TEST(LoadManifestTest, DuplicateIdNamesSample) {
  json j = ThreeSampleManifest();
  j["samples"][1]["id"] = "s1";
  auto m = ParseManifest(j);
  ASSERT_FALSE(m.ok());
  EXPECT_EQ(m.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(m.status().message().find("\"s1\""), std::string::npos);
}

TEST(LoadManifestTest, RejectsInvalidSamples) {
  json no_positive = ThreeSampleManifest();
  no_positive["samples"][0]["answers"] = {{{"answer", "red"}, {"score", 0.0}}};
  auto m = ParseManifest(no_positive);
  ASSERT_FALSE(m.ok());
  EXPECT_NE(m.status().message().find("\"s1\""), std::string::npos);

  json empty_answers = ThreeSampleManifest();
  empty_answers["samples"][1]["answers"] = json::array();
  m = ParseManifest(empty_answers);
  ASSERT_FALSE(m.ok());
  EXPECT_NE(m.status().message().find("\"s2\""), std::string::npos);

  json dup_after_norm = ThreeSampleManifest();
  dup_after_norm["samples"][1]["answers"] = {
      {{"answer", "Yes"}, {"score", 1.0}}, {{"answer", " yes"}, {"score", 1.0}}};
  EXPECT_FALSE(ParseManifest(dup_after_norm).ok());

  json no_samples = {{"name", "x"}, {"samples", json::array()}};
  EXPECT_FALSE(ParseManifest(no_samples).ok());
}

TEST(LoadManifestTest, MalformedFileIsParseError) {
  auto path = WriteTemp("broken.json", "{\"name\": ");
  auto m = LoadManifest(path);
  ASSERT_FALSE(m.ok());
  EXPECT_EQ(m.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(LoadManifest("/nonexistent/manifest.json").ok());
}

TEST(LoadManifestTest, WriteThenLoadRoundTrips) {
  auto path = WriteTemp("three.json", ThreeSampleManifest().dump());
  auto m = LoadManifest(path);
  ASSERT_TRUE(m.ok());
  auto out = std::filesystem::path(::testing::TempDir()) / "roundtrip.json";
  ASSERT_TRUE(WriteManifest(*m, out).ok());
  auto again = LoadManifest(out);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->samples, m->samples);
}

TEST(VqaAnswerScoresTest, PublishedFormula) {
  auto three = VqaAnswerScores({{"red", 3}});
  ASSERT_EQ(three.size(), 1u);
  EXPECT_EQ(three[0], (AnswerScore{"red", 1.0}));

  auto one = VqaAnswerScores({{"red", 1}});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].score, 1.0 / 3.0);

  auto clamped = VqaAnswerScores({{"red", 5}, {"blue", 0}});
  ASSERT_EQ(clamped.size(), 1u);
  EXPECT_EQ(clamped[0], (AnswerScore{"red", 1.0}));
}

TEST(VqaAnswerScoresTest, MatchesMinFormulaForAllSmallCounts) {
  for (int64_t c = 0; c <= 10; ++c) {
    auto scores = VqaAnswerScores({{"a", c}});
    if (c == 0) {
      EXPECT_TRUE(scores.empty());
      continue;
    }
    ASSERT_EQ(scores.size(), 1u);
    EXPECT_EQ(scores[0].score, std::min(1.0, static_cast<double>(c) / 3.0))
        << "count " << c;
  }
}

TEST(ScoreOfTest, NormalizedLookup) {
  Sample red{"s", "i", "q", {{"red", 1.0}}};
  EXPECT_EQ(ScoreOf(red, "Red"), 1.0);
  EXPECT_EQ(ScoreOf(red, "  RED  "), 1.0);
  Sample third{"s", "i", "q", {{"red", 0.333}}};
  EXPECT_EQ(ScoreOf(third, "blue"), 0.0);
  Sample two{"s", "i", "q", {{"2", 0.666}, {"two", 1.0}}};
  EXPECT_EQ(ScoreOf(two, "two"), 1.0);
  EXPECT_EQ(ScoreOf(two, "2"), 0.666);
}

TEST(ScoreOfTest, PositiveIffPresentWithPositiveScore) {
  Rng rng(3);
  const std::vector<std::string> vocab = {"red", "blue", "two", "2", "yes"};
  for (int iter = 0; iter < 200; ++iter) {
    Sample s{"s", "i", "q", {}};
    for (const auto& word : vocab) {
      if (rng.Bernoulli(0.5)) {
        s.answers.push_back({word, rng.Bernoulli(0.3) ? 0.0 : rng.Uniform()});
      }
    }
    for (const auto& word : vocab) {
      bool present = false;
      for (const auto& a : s.answers) present |= a.answer == word && a.score > 0;
      EXPECT_EQ(ScoreOf(s, word) > 0.0, present);
    }
  }
}

TEST(SubsampleTest, SmallDatasetIsReturnedWhole) {
  DatasetManifest m = Synthetic(10);
  DatasetManifest out = Subsample(m, {15000, 1});
  EXPECT_EQ(out.samples, m.samples);
}

TEST(SubsampleTest, LargeDatasetIsDeterministic) {
  DatasetManifest m = Synthetic(20000);
  DatasetManifest a = Subsample(m, {15000, 7});
  DatasetManifest b = Subsample(m, {15000, 7});
  ASSERT_EQ(a.samples.size(), 15000u);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(Ids(a).size(), 15000u);
}

TEST(SubsampleTest, SeedChangesSelection) {
  DatasetManifest m = Synthetic(100);
  auto a = Ids(Subsample(m, {50, 7}));
  auto b = Ids(Subsample(m, {50, 8}));
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(b.size(), 50u);
  EXPECT_NE(a, b);
}

TEST(SubsampleTest, IdempotentUnderSameSpec) {
  DatasetManifest m = Synthetic(300);
  SubsampleSpec spec{40, 11};
  DatasetManifest once = Subsample(m, spec);
  EXPECT_EQ(Subsample(once, spec).samples, once.samples);
}

TEST(SubsampleTest, SelectionIsRoughlyUniform) {
  // Each of 10 samples should be drawn about half the time when choosing 5.
  DatasetManifest m = Synthetic(10);
  std::vector<int> hits(10, 0);
  const int kRuns = 4000;
  for (int seed = 0; seed < kRuns; ++seed) {
    for (const Sample& s : Subsample(m, {5, static_cast<uint64_t>(seed)})
                               .samples) {
      ++hits[std::stoi(s.id.substr(1))];
    }
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(kRuns), 0.5, 0.04);
}

}  // namespace
}  // namespace vqaprobe
