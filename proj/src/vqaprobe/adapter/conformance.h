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

#ifndef VQAPROBE_ADAPTER_CONFORMANCE_H_
#define VQAPROBE_ADAPTER_CONFORMANCE_H_

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"

namespace vqaprobe {

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::string url;
  std::vector<ConformanceCheck> checks;

  bool passed() const;
  const ConformanceCheck* Find(const std::string& name) const;
  nlohmann::json ToJson() const;
  // One "PASS name" / "FAIL name: detail" line per check.
  std::string ToText() const;
};

// Exercises every endpoint of the adapter at `url` with fixed requests.
// Checks: connection, capabilities schema, predict, topk ordering,
// probability range, determinism, precondition rejection, malformed request,
// and one check per optional capability (declared ones must work, missing
// ones must answer capability_missing).
ConformanceReport RunConformance(
    const std::string& url,
    std::chrono::milliseconds timeout = std::chrono::milliseconds(60'000));

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_CONFORMANCE_H_
