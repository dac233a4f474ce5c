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

#ifndef VQAPROBE_SEAR_TAGGER_H_
#define VQAPROBE_SEAR_TAGGER_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace vqaprobe::sear {

// Closed tagset. kWrb (wh-adverb) fills the ADV slot of the fourth rewrite
// rule.
enum class PosTag { kWp, kWrb, kVbz, kNoun, kOther };

std::string_view PosTagName(PosTag tag);
std::optional<PosTag> ParsePosTag(std::string_view name);

struct TaggedToken {
  std::string text;
  PosTag tag = PosTag::kOther;
  // Byte span in the tagged string.
  size_t begin = 0;
  size_t end = 0;
  bool is_word = true;

  bool operator==(const TaggedToken&) const = default;
};

// Lowercased token -> tag.
class Lexicon {
 public:
  // `token<TAB>tag` lines; blank lines and lines starting with '#' skipped.
  static absl::StatusOr<Lexicon> Parse(std::string_view text);
  static absl::StatusOr<Lexicon> LoadFromFile(const std::filesystem::path& path);
  // The lexicon shipped with the library (data/lexicon.tsv, compiled in).
  static const Lexicon& Default();

  std::optional<PosTag> Lookup(std::string_view lower) const;
  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, PosTag> entries_;
};

// Lexicon-plus-suffix tagger for English questions. Tokens are maximal runs
// of letters, digits and non-ASCII bytes, with inner apostrophes and hyphens
// kept ("What's", "t-shirt"); every other non-space byte is its own token.
// Total and deterministic over arbitrary byte strings.
class PosTagger {
 public:
  explicit PosTagger(const Lexicon& lexicon = Lexicon::Default())
      : lexicon_(&lexicon) {}

  std::vector<TaggedToken> Tag(std::string_view text) const;

  // Lowercased, singularized NOUN tokens minus generic nouns ("picture",
  // "kind", ...) that say nothing about a question's subject.
  std::set<std::string> ExtractNouns(std::string_view text) const;

 private:
  PosTag TagWord(const std::string& lower, bool capitalized,
                 bool first_word) const;
  // Lexicon form of a noun token: strips a possessive and a plural ending
  // when the stem is a known noun.
  std::string NounLemma(const std::string& lower) const;
  bool IsLexiconNoun(const std::string& lower) const;

  const Lexicon* lexicon_;
};

}  // namespace vqaprobe::sear

#endif  // VQAPROBE_SEAR_TAGGER_H_
