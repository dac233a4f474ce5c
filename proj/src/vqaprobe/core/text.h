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

#ifndef VQAPROBE_CORE_TEXT_H_
#define VQAPROBE_CORE_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace vqaprobe {

// Lowercases ASCII letters, trims, and collapses internal whitespace runs to a
// single space. Non-ASCII bytes pass through unchanged.
std::string NormalizeAnswer(std::string_view text);

std::string AsciiLower(std::string_view text);

// 64-bit FNV-1a. Used wherever a hash must be stable across platforms and
// releases (seed derivation, stub adapters).
uint64_t Fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

std::string Hex64(uint64_t value);

}  // namespace vqaprobe

#endif  // VQAPROBE_CORE_TEXT_H_
