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

#include "vqaprobe/sear/tagger.h"

#include <array>

#include "fmt/format.h"
#include "vqaprobe/core/image.h"  // ReadFileBytes
#include "vqaprobe/core/text.h"

namespace vqaprobe::sear {

extern const char kDefaultLexiconTsv[];

namespace {

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

bool IsSpaceByte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// "'s" or the typographic "’s" (U+2019).
std::optional<std::string> StripPossessive(const std::string& lower) {
  for (std::string_view suffix : {std::string_view("'s"),
                                  std::string_view("\xE2\x80\x99s")}) {
    if (lower.size() > suffix.size() && EndsWith(lower, suffix)) {
      return lower.substr(0, lower.size() - suffix.size());
    }
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 13> kNounSuffixes = {
    "tion", "sion", "ment", "ness", "ity",   "ship", "ism",
    "ist",  "ance", "ence", "hood", "ology", "ery"};

constexpr std::array<std::string_view, 21> kGenericNouns = {
    "kind",  "type",   "sort",  "thing", "things",     "picture", "photo",
    "image", "pic",    "shot",  "scene", "photograph", "view",    "part",
    "lot",   "number", "side",  "top",   "bottom",     "front",   "back"};

bool HasNounSuffix(std::string_view lower) {
  if (lower.size() < 6) return false;
  for (std::string_view suffix : kNounSuffixes) {
    if (EndsWith(lower, suffix)) return true;
  }
  return false;
}

bool AllDigits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

}  // namespace

std::string_view PosTagName(PosTag tag) {
  switch (tag) {
    case PosTag::kWp:
      return "WP";
    case PosTag::kWrb:
      return "WRB";
    case PosTag::kVbz:
      return "VBZ";
    case PosTag::kNoun:
      return "NOUN";
    case PosTag::kOther:
      return "OTHER";
  }
  return "OTHER";
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (PosTag tag : {PosTag::kWp, PosTag::kWrb, PosTag::kVbz, PosTag::kNoun,
                     PosTag::kOther}) {
    if (PosTagName(tag) == name) return tag;
  }
  return std::nullopt;
}

absl::StatusOr<Lexicon> Lexicon::Parse(std::string_view text) {
  Lexicon lexicon;
  size_t line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view()
                                        : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      return absl::InvalidArgumentError(
          fmt::format("lexicon line {}: expected token<TAB>tag", line_no));
    }
    std::optional<PosTag> tag = ParsePosTag(line.substr(tab + 1));
    if (!tag) {
      return absl::InvalidArgumentError(fmt::format(
          "lexicon line {}: unknown tag \"{}\"", line_no, line.substr(tab + 1)));
    }
    lexicon.entries_[AsciiLower(line.substr(0, tab))] = *tag;
  }
  return lexicon;
}

absl::StatusOr<Lexicon> Lexicon::LoadFromFile(
    const std::filesystem::path& path) {
  absl::StatusOr<std::string> bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  return Parse(*bytes);
}

const Lexicon& Lexicon::Default() {
  static const Lexicon* lexicon = [] {
    absl::StatusOr<Lexicon> parsed = Parse(kDefaultLexiconTsv);
    // The embedded copy is validated by the build's tests.
    return new Lexicon(parsed.ok() ? *std::move(parsed) : Lexicon());
  }();
  return *lexicon;
}

std::optional<PosTag> Lexicon::Lookup(std::string_view lower) const {
  auto it = entries_.find(std::string(lower));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool PosTagger::IsLexiconNoun(const std::string& lower) const {
  return lexicon_->Lookup(lower) == PosTag::kNoun;
}

std::string PosTagger::NounLemma(const std::string& lower) const {
  std::string word = StripPossessive(lower).value_or(lower);
  if (IsLexiconNoun(word)) return word;
  if (EndsWith(word, "ies") && word.size() > 4) {
    std::string stem = word.substr(0, word.size() - 3) + "y";
    if (IsLexiconNoun(stem)) return stem;
  }
  if (EndsWith(word, "es") && word.size() > 3) {
    std::string stem = word.substr(0, word.size() - 2);
    if (IsLexiconNoun(stem)) return stem;
  }
  if (EndsWith(word, "s") && !EndsWith(word, "ss") && word.size() > 2) {
    std::string stem = word.substr(0, word.size() - 1);
    if (IsLexiconNoun(stem) || HasNounSuffix(stem)) return stem;
  }
  return word;
}

PosTag PosTagger::TagWord(const std::string& lower, bool capitalized,
                          bool first_word) const {
  if (std::optional<PosTag> tag = lexicon_->Lookup(lower)) return *tag;
  if (std::optional<std::string> head = StripPossessive(lower)) {
    std::optional<PosTag> head_tag = lexicon_->Lookup(*head);
    if (head_tag == PosTag::kWp || head_tag == PosTag::kWrb) return *head_tag;
    if (head_tag) return *head_tag == PosTag::kNoun ? PosTag::kNoun
                                                    : PosTag::kOther;
    return TagWord(*head, capitalized, first_word) == PosTag::kNoun
               ? PosTag::kNoun
               : PosTag::kOther;
  }
  if (AllDigits(lower)) return PosTag::kOther;
  const std::string lemma = NounLemma(lower);
  if (IsLexiconNoun(lemma) || HasNounSuffix(lemma)) return PosTag::kNoun;
  // Unknown capitalized word mid-sentence: most likely a proper noun.
  if (capitalized && !first_word) return PosTag::kNoun;
  return PosTag::kOther;
}

std::vector<TaggedToken> PosTagger::Tag(std::string_view text) const {
  std::vector<TaggedToken> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsSpaceByte(c)) {
      ++i;
      continue;
    }
    if (!IsWordByte(c)) {
      tokens.push_back({std::string(1, text[i]), PosTag::kOther, i, i + 1,
                        /*is_word=*/false});
      ++i;
      continue;
    }
    size_t j = i;
    while (j < n) {
      const auto cj = static_cast<unsigned char>(text[j]);
      if (IsWordByte(cj)) {
        ++j;
      } else if ((cj == '\'' || cj == '-') && j + 1 < n &&
                 IsWordByte(static_cast<unsigned char>(text[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    tokens.push_back({std::string(text.substr(i, j - i)), PosTag::kOther, i, j,
                      /*is_word=*/true});
    i = j;
  }

  bool first_word = true;
  for (TaggedToken& token : tokens) {
    if (!token.is_word) continue;
    const bool capitalized = token.text[0] >= 'A' && token.text[0] <= 'Z';
    token.tag = TagWord(AsciiLower(token.text), capitalized, first_word);
    first_word = false;
  }

  // "which" is a pronoun only when it opens the question and is followed
  // directly by a verb ("Which is bigger?"); elsewhere it is a determiner.
  int first_word_index = -1;
  for (size_t k = 0; k < tokens.size(); ++k) {
    if (!tokens[k].is_word) continue;
    if (first_word_index < 0) first_word_index = static_cast<int>(k);
    if (AsciiLower(tokens[k].text) != "which") continue;
    const bool pronoun = static_cast<int>(k) == first_word_index &&
                         k + 1 < tokens.size() &&
                         tokens[k + 1].tag == PosTag::kVbz;
    tokens[k].tag = pronoun ? PosTag::kWp : PosTag::kOther;
  }
  return tokens;
}

std::set<std::string> PosTagger::ExtractNouns(std::string_view text) const {
  std::set<std::string> nouns;
  for (const TaggedToken& token : Tag(text)) {
    if (token.tag != PosTag::kNoun) continue;
    std::string lemma = NounLemma(AsciiLower(token.text));
    bool generic = false;
    for (std::string_view g : kGenericNouns) generic |= lemma == g;
    if (!generic && !lemma.empty()) nouns.insert(std::move(lemma));
  }
  return nouns;
}

}  // namespace vqaprobe::sear
