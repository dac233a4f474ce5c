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

#ifndef VQAPROBE_SEAR_GOLDEN_H_
#define VQAPROBE_SEAR_GOLDEN_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "vqaprobe/sear/rules.h"
#include "vqaprobe/sear/tagger.h"

namespace vqaprobe::sear {

// One row of a hand-tagged golden file:
//   question<TAB>tok/TAG tok/TAG ...<TAB>R1<TAB>R2<TAB>R3<TAB>R4
// A rewrite column of "-" means the rule must not apply.
struct GoldenEntry {
  std::string question;
  std::vector<std::pair<std::string, PosTag>> tags;
  std::array<std::optional<std::string>, 4> rewrites;
};

absl::StatusOr<std::vector<GoldenEntry>> ParseGoldenSet(std::string_view text);

// Human-readable description of every disagreement; empty when all match.
std::vector<std::string> CompareWithGolden(const PosTagger& tagger,
                                           const GoldenEntry& entry);

}  // namespace vqaprobe::sear

#endif  // VQAPROBE_SEAR_GOLDEN_H_
