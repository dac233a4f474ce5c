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

#include "vqaprobe/core/text.h"

namespace vqaprobe::sear {
namespace {

struct Edit {
  size_t begin;
  size_t end;
  std::string replacement;
};

std::string ApplyEdits(std::string_view original,
                       const std::vector<Edit>& edits) {
  std::string out;
  size_t pos = 0;
  for (const Edit& e : edits) {
    out.append(original.substr(pos, e.begin - pos));
    out.append(e.replacement);
    pos = e.end;
  }
  out.append(original.substr(pos));
  return out;
}

bool IsContractibleVerb(const TaggedToken& token) {
  const std::string lower = AsciiLower(token.text);
  return lower == "is" || lower == "does" || lower == "has";
}

// First adjacent (head, VBZ) pair -> "head's".
std::optional<Edit> Contract(const std::vector<TaggedToken>& tokens,
                             PosTag head, bool only_is_does_has) {
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    const TaggedToken& a = tokens[i];
    const TaggedToken& b = tokens[i + 1];
    if (a.tag != head || b.tag != PosTag::kVbz) continue;
    if (only_is_does_has && !IsContractibleVerb(b)) continue;
    return Edit{a.begin, b.end, a.text + "'s"};
  }
  return std::nullopt;
}

// Replacement that follows the casing pattern of `source`.
std::string MatchCase(std::string_view source, std::string_view lower) {
  bool all_upper = source.size() > 1;
  for (char c : source) {
    if (c >= 'a' && c <= 'z') all_upper = false;
  }
  std::string out(lower);
  if (all_upper) {
    for (char& c : out) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
  } else if (!source.empty() && source[0] >= 'A' && source[0] <= 'Z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

std::vector<Edit> FindEdits(SearRule rule,
                            const std::vector<TaggedToken>& tokens) {
  std::vector<Edit> edits;
  switch (rule) {
    case SearRule::kR1:
      if (auto e = Contract(tokens, PosTag::kWp, true)) edits.push_back(*e);
      break;
    case SearRule::kR4:
      if (auto e = Contract(tokens, PosTag::kWrb, false)) edits.push_back(*e);
      break;
    case SearRule::kR2: {
      size_t first = 0;
      while (first < tokens.size() && !tokens[first].is_word) ++first;
      if (first + 1 >= tokens.size()) break;
      const TaggedToken& what = tokens[first];
      if (AsciiLower(what.text) == "what" &&
          tokens[first + 1].tag == PosTag::kNoun) {
        edits.push_back({what.begin, what.end, MatchCase(what.text, "which")});
      }
      break;
    }
    case SearRule::kR3:
      for (const TaggedToken& t : tokens) {
        const std::string lower = AsciiLower(t.text);
        if (lower == "color" || lower == "colors") {
          edits.push_back({t.begin, t.end,
                           MatchCase(t.text, lower == "color" ? "colour"
                                                              : "colours")});
        }
      }
      break;
  }
  return edits;
}

}  // namespace

std::string_view SearRuleName(SearRule rule) {
  switch (rule) {
    case SearRule::kR1:
      return "R1";
    case SearRule::kR2:
      return "R2";
    case SearRule::kR3:
      return "R3";
    case SearRule::kR4:
      return "R4";
  }
  return "R?";
}

std::optional<SearRule> ParseSearRule(std::string_view name) {
  for (SearRule rule : kAllRules) {
    if (SearRuleName(rule) == name) return rule;
  }
  return std::nullopt;
}

RewriteResult ApplyRule(SearRule rule, const std::vector<TaggedToken>& tokens,
                        std::string_view original) {
  RewriteResult result;
  result.rule = rule;
  const std::vector<Edit> edits = FindEdits(rule, tokens);
  if (edits.empty()) return result;
  std::string rewritten = ApplyEdits(original, edits);
  if (rewritten == original) return result;
  result.applied = true;
  result.rewritten = std::move(rewritten);
  return result;
}

std::array<RewriteResult, 4> ApplyAll(const PosTagger& tagger,
                                      std::string_view question) {
  const std::vector<TaggedToken> tokens = tagger.Tag(question);
  std::array<RewriteResult, 4> out;
  for (size_t i = 0; i < kAllRules.size(); ++i) {
    out[i] = ApplyRule(kAllRules[i], tokens, question);
  }
  return out;
}

}  // namespace vqaprobe::sear
