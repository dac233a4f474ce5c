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

#include "vqaprobe/sear/golden.h"

#include "fmt/format.h"

namespace vqaprobe::sear {
namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string FormatTags(const std::vector<std::pair<std::string, PosTag>>& t) {
  std::string out;
  for (const auto& [text, tag] : t) {
    if (!out.empty()) out += ' ';
    out += fmt::format("{}/{}", text, PosTagName(tag));
  }
  return out;
}

}  // namespace

absl::StatusOr<std::vector<GoldenEntry>> ParseGoldenSet(
    std::string_view text) {
  std::vector<GoldenEntry> entries;
  size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string_view> cols = Split(line, '\t');
    if (cols.size() != 6) {
      return absl::InvalidArgumentError(
          fmt::format("golden line {}: expected 6 columns, got {}", line_no,
                      cols.size()));
    }
    GoldenEntry entry;
    entry.question = std::string(cols[0]);
    if (!cols[1].empty()) {
      for (std::string_view item : Split(cols[1], ' ')) {
        const size_t slash = item.rfind('/');
        std::optional<PosTag> tag =
            slash == std::string_view::npos
                ? std::nullopt
                : ParsePosTag(item.substr(slash + 1));
        if (!tag || slash == 0) {
          return absl::InvalidArgumentError(
              fmt::format("golden line {}: bad token \"{}\"", line_no, item));
        }
        entry.tags.emplace_back(std::string(item.substr(0, slash)), *tag);
      }
    }
    for (size_t r = 0; r < 4; ++r) {
      if (cols[2 + r] != "-") entry.rewrites[r] = std::string(cols[2 + r]);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<std::string> CompareWithGolden(const PosTagger& tagger,
                                           const GoldenEntry& entry) {
  std::vector<std::string> diffs;
  std::vector<std::pair<std::string, PosTag>> got;
  for (const TaggedToken& t : tagger.Tag(entry.question)) {
    got.emplace_back(t.text, t.tag);
  }
  if (got != entry.tags) {
    diffs.push_back(fmt::format("\"{}\": tags {} != {}", entry.question,
                                FormatTags(got), FormatTags(entry.tags)));
  }
  const std::array<RewriteResult, 4> results = ApplyAll(tagger, entry.question);
  for (size_t r = 0; r < 4; ++r) {
    if (results[r].rewritten != entry.rewrites[r]) {
      diffs.push_back(fmt::format(
          "\"{}\": {} gave \"{}\", expected \"{}\"", entry.question,
          SearRuleName(kAllRules[r]), results[r].rewritten.value_or("-"),
          entry.rewrites[r].value_or("-")));
    }
  }
  return diffs;
}

}  // namespace vqaprobe::sear
