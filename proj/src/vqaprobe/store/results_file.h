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

#ifndef VQAPROBE_STORE_RESULTS_FILE_H_
#define VQAPROBE_STORE_RESULTS_FILE_H_

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "vqaprobe/metrics/sample_metrics.h"

namespace vqaprobe {

inline constexpr char kResultsSchema[] = "vqaprobe/1";

// First line of every results file.
struct RunHeader {
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json capabilities = nlohmann::json::object();
  nlohmann::json calibration = nullptr;
  std::string tool_version;
  std::string created_at;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const RunHeader&) const = default;
};

nlohmann::json RunHeaderToJson(const RunHeader& header);
absl::StatusOr<RunHeader> RunHeaderFromJson(const nlohmann::json& j);

struct CorruptLine {
  int line = 0;  // 1-based
  std::string error;
};

struct ResultsFile {
  RunHeader header;
  std::vector<SampleMetrics> records;
  std::vector<CorruptLine> corrupt;
};

enum class ReadMode {
  // Corrupt record lines are reported and skipped.
  kLenient,
  // The first corrupt line fails the read.
  kStrict,
};

// A missing or unreadable header always fails. A last line without its
// newline is an interrupted write and counts as corrupt.
absl::StatusOr<ResultsFile> ReadResultsFile(const std::filesystem::path& path,
                                            ReadMode mode = ReadMode::kLenient);

// Append-only writer. Each record goes out as one write of the full line.
class ResultsWriter {
 public:
  // Writes the header to a temporary file and renames it into place. Fails
  // if `path` exists.
  static absl::StatusOr<std::unique_ptr<ResultsWriter>> Create(
      const std::filesystem::path& path, const RunHeader& header);
  // Opens an existing file for appending, cutting off a trailing partial line.
  static absl::StatusOr<std::unique_ptr<ResultsWriter>> Append(
      const std::filesystem::path& path);

  ~ResultsWriter();
  ResultsWriter(const ResultsWriter&) = delete;
  ResultsWriter& operator=(const ResultsWriter&) = delete;

  absl::Status Write(const SampleMetrics& record);

 private:
  explicit ResultsWriter(int fd) : fd_(fd) {}
  int fd_;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_STORE_RESULTS_FILE_H_
