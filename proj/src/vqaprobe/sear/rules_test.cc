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

#include "vqaprobe/sear/rules.h"

#include <random>

#include "gtest/gtest.h"
#include "vqaprobe/core/image.h"
#include "vqaprobe/sear/golden.h"

namespace vqaprobe::sear {
namespace {

RewriteResult Apply(SearRule rule, std::string_view q) {
  PosTagger tagger;
  return ApplyRule(rule, tagger.Tag(q), q);
}

TEST(ApplyRule, Examples) {
  EXPECT_EQ(Apply(SearRule::kR1, "What is the color of the car?").rewritten,
            "What's the color of the car?");
  EXPECT_EQ(Apply(SearRule::kR2, "What color is the car?").rewritten,
            "Which color is the car?");
  const RewriteResult r3 = Apply(SearRule::kR3, "What colour is it?");
  EXPECT_FALSE(r3.applied);
  EXPECT_FALSE(r3.rewritten.has_value());
  EXPECT_EQ(Apply(SearRule::kR4, "Where is the dog?").rewritten,
            "Where's the dog?");
}

TEST(ApplyRule, R1ContractsOnlyIsDoesHas) {
  EXPECT_FALSE(Apply(SearRule::kR1, "Who plays the guitar?").applied);
  EXPECT_EQ(Apply(SearRule::kR1, "Who does the man see?").rewritten,
            "Who's the man see?");
}

TEST(ApplyRule, ContractsFirstPairOnly) {
  EXPECT_EQ(Apply(SearRule::kR4, "Where is it and how is it?").rewritten,
            "Where's it and how is it?");
}

TEST(ApplyRule, R3ReplacesEveryOccurrenceAndKeepsCase) {
  EXPECT_EQ(Apply(SearRule::kR3, "Color: what COLORS and colors?").rewritten,
            "Colour: what COLOURS and colours?");
  EXPECT_FALSE(Apply(SearRule::kR3, "Is it colorful?").applied);
}

TEST(ApplyRule, R2NeedsSentenceInitialWhat) {
  EXPECT_FALSE(Apply(SearRule::kR2, "So what color is it?").applied);
  EXPECT_EQ(Apply(SearRule::kR2, "  what color?").rewritten, "  which color?");
  EXPECT_FALSE(Apply(SearRule::kR2, "What").applied);
}

TEST(ApplyAll, IndependentRules) {
  PosTagger tagger;
  auto r = ApplyAll(tagger, "What is the color of the car?");
  EXPECT_TRUE(r[0].applied);
  EXPECT_FALSE(r[1].applied);
  EXPECT_TRUE(r[2].applied);
  EXPECT_FALSE(r[3].applied);
  for (const RewriteResult& x : ApplyAll(tagger, "Is the cat black?")) {
    EXPECT_FALSE(x.applied);
  }
  r = ApplyAll(tagger, "Where does the man sit?");
  EXPECT_FALSE(r[0].applied || r[1].applied || r[2].applied);
  EXPECT_EQ(r[3].rewritten, "Where's the man sit?");
  for (size_t i = 0; i < 4; ++i) EXPECT_EQ(r[i].rule, kAllRules[i]);
}

TEST(SearRule, NamesRoundTrip) {
  for (SearRule rule : kAllRules) {
    EXPECT_EQ(ParseSearRule(SearRuleName(rule)), rule);
  }
  EXPECT_FALSE(ParseSearRule("R5").has_value());
}

std::vector<std::string> Corpus() {
  std::vector<std::string> out;
  absl::StatusOr<std::string> text = ReadFileBytes(VQAPROBE_SEAR_GOLDEN);
  if (!text.ok()) return out;
  absl::StatusOr<std::vector<GoldenEntry>> golden = ParseGoldenSet(*text);
  if (!golden.ok()) return out;
  for (const GoldenEntry& e : *golden) out.push_back(e.question);
  return out;
}

size_t WordCount(const PosTagger& tagger, std::string_view q) {
  return tagger.Tag(q).size();
}

TEST(RuleProperties, IdempotentAndTokenCountChange) {
  PosTagger tagger;
  const std::vector<std::string> corpus = Corpus();
  ASSERT_FALSE(corpus.empty());
  for (const std::string& q : corpus) {
    for (SearRule rule : kAllRules) {
      const RewriteResult r = ApplyRule(rule, tagger.Tag(q), q);
      EXPECT_EQ(r.applied, r.rewritten.has_value());
      if (!r.applied) continue;
      EXPECT_NE(*r.rewritten, q);
      const RewriteResult again =
          ApplyRule(rule, tagger.Tag(*r.rewritten), *r.rewritten);
      EXPECT_FALSE(again.applied) << SearRuleName(rule) << " on " << q;
      const size_t before = WordCount(tagger, q);
      const size_t after = WordCount(tagger, *r.rewritten);
      if (rule == SearRule::kR1 || rule == SearRule::kR4) {
        EXPECT_EQ(after + 1, before) << q;
      } else {
        EXPECT_EQ(after, before) << q;
      }
    }
  }
}

TEST(RuleProperties, EditsStayAtPatternSites) {
  PosTagger tagger;
  for (const std::string& q : Corpus()) {
    const auto tokens = tagger.Tag(q);
    for (SearRule rule : kAllRules) {
      const RewriteResult r = ApplyRule(rule, tokens, q);
      if (!r.applied) continue;
      const auto rewritten = tagger.Tag(*r.rewritten);
      // Untouched tokens survive verbatim, in order.
      size_t same = 0;
      for (const TaggedToken& t : rewritten) {
        for (const TaggedToken& o : tokens) {
          if (o.text == t.text) {
            ++same;
            break;
          }
        }
      }
      const size_t changed = rewritten.size() - same;
      EXPECT_GE(changed, 1u) << q;
      if (rule != SearRule::kR3) EXPECT_EQ(changed, 1u) << q;
    }
  }
}

TEST(RuleProperties, TotalOnRandomInput) {
  PosTagger tagger;
  std::mt19937_64 gen(3);
  const std::vector<std::string> words = {
      "What", "what", "is", "does", "has", "Where", "how", "color", "Colors",
      "the",  "car",  "'s", "?",    ",",   "\xC3\xA9", "which", "dog", ""};
  for (int iter = 0; iter < 3000; ++iter) {
    std::string q;
    const size_t n = gen() % 8;
    for (size_t i = 0; i < n; ++i) {
      q += words[gen() % words.size()];
      if (gen() % 3) q += ' ';
    }
    for (const RewriteResult& r : ApplyAll(tagger, q)) {
      EXPECT_EQ(r.applied, r.rewritten.has_value());
      if (r.applied) EXPECT_NE(*r.rewritten, q);
    }
  }
}

}  // namespace
}  // namespace vqaprobe::sear
