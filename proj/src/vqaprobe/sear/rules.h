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

#ifndef VQAPROBE_SEAR_RULES_H_
#define VQAPROBE_SEAR_RULES_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vqaprobe/sear/tagger.h"

namespace vqaprobe::sear {

// The four semantically equivalent rewrite rules:
//   R1  WP VBZ     -> WP's      ("What is"     -> "What's")
//   R2  What NOUN  -> Which NOUN ("What color" -> "Which color")
//   R3  color      -> colour
//   R4  WRB VBZ    -> WRB's     ("Where is"    -> "Where's")
enum class SearRule { kR1, kR2, kR3, kR4 };

inline constexpr std::array<SearRule, 4> kAllRules = {
    SearRule::kR1, SearRule::kR2, SearRule::kR3, SearRule::kR4};

std::string_view SearRuleName(SearRule rule);
std::optional<SearRule> ParseSearRule(std::string_view name);

struct RewriteResult {
  SearRule rule = SearRule::kR1;
  bool applied = false;
  std::optional<std::string> rewritten;

  bool operator==(const RewriteResult&) const = default;
};

// `tokens` must come from tagging `original`. R1 and R4 contract only the
// first matching pair; R1 only contracts is/does/has. Text outside the
// rewritten span is preserved byte for byte.
RewriteResult ApplyRule(SearRule rule, const std::vector<TaggedToken>& tokens,
                        std::string_view original);

// Every rule applied independently to the original question.
std::array<RewriteResult, 4> ApplyAll(const PosTagger& tagger,
                                      std::string_view question);

}  // namespace vqaprobe::sear

#endif  // VQAPROBE_SEAR_RULES_H_
