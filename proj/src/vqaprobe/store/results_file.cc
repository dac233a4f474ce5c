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

#include "vqaprobe/store/results_file.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "fmt/format.h"
#include "vqaprobe/store/records.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

absl::Status ErrnoError(std::string_view what, const std::filesystem::path& p) {
  return absl::InternalError(
      fmt::format("{} {}: {}", what, p.string(), std::strerror(errno)));
}

absl::Status WriteAll(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return absl::InternalError(fmt::format("write: {}", std::strerror(errno)));
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
  return absl::OkStatus();
}

}  // namespace

json RunHeaderToJson(const RunHeader& header) {
  json j = header.extra.is_object() ? header.extra : json::object();
  j["schema"] = kResultsSchema;
  j["config"] = header.config;
  j["capabilities"] = header.capabilities;
  j["calibration"] = header.calibration;
  j["tool_version"] = header.tool_version;
  j["created_at"] = header.created_at;
  return j;
}

absl::StatusOr<RunHeader> RunHeaderFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("header must be an object");
  if (j.value("schema", "") != kResultsSchema) {
    return absl::InvalidArgumentError(fmt::format(
        "unsupported schema {}", j.contains("schema") ? j["schema"].dump() : "(none)"));
  }
  RunHeader h;
  h.config = j.value("config", json::object());
  h.capabilities = j.value("capabilities", json::object());
  h.calibration = j.value("calibration", json());
  h.tool_version = j.value("tool_version", "");
  h.created_at = j.value("created_at", "");
  static const std::set<std::string> known = {
      "schema", "config", "capabilities", "calibration", "tool_version", "created_at"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) h.extra[key] = value;
  }
  return h;
}

absl::StatusOr<ResultsFile> ReadResultsFile(const std::filesystem::path& path,
                                            ReadMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  ResultsFile file;
  size_t pos = 0;
  int line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::string_view line(text.data() + pos,
                                (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    ++line_no;
    if (!have_header) {
      if (!terminated) {
        return absl::DataLossError(
            fmt::format("{}: truncated header line", path.string()));
      }
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        return absl::DataLossError(
            fmt::format("{}:1: header is not valid JSON", path.string()));
      }
      absl::StatusOr<RunHeader> header = RunHeaderFromJson(j);
      if (!header.ok()) {
        return absl::DataLossError(fmt::format(
            "{}:1: {}", path.string(), std::string(header.status().message())));
      }
      file.header = *std::move(header);
      have_header = true;
      continue;
    }
    if (line.empty() && terminated) continue;
    std::string error;
    if (!terminated) {
      error = "truncated line";
    } else {
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        error = "invalid JSON";
      } else if (absl::StatusOr<SampleMetrics> r = SampleMetricsFromJson(j); r.ok()) {
        file.records.push_back(*std::move(r));
        continue;
      } else {
        error = std::string(r.status().message());
      }
    }
    if (mode == ReadMode::kStrict) {
      return absl::DataLossError(
          fmt::format("{}:{}: {}", path.string(), line_no, error));
    }
    file.corrupt.push_back({line_no, std::move(error)});
  }
  if (!have_header) {
    return absl::DataLossError(fmt::format("{}: missing header", path.string()));
  }
  return file;
}

absl::StatusOr<std::unique_ptr<ResultsWriter>> ResultsWriter::Create(
    const std::filesystem::path& path, const RunHeader& header) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    return absl::AlreadyExistsError(fmt::format("{} exists", path.string()));
  }
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      return absl::InternalError(fmt::format(
          "cannot create {}: {}", path.parent_path().string(), ec.message()));
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) return ErrnoError("cannot create", tmp);
  const std::string line = RunHeaderToJson(header).dump(
                               -1, ' ', false, json::error_handler_t::replace) +
                           "\n";
  if (absl::Status s = WriteAll(fd, line); !s.ok()) {
    ::close(fd);
    return s;
  }
  ::fsync(fd);
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    ::close(fd);
    return absl::InternalError(
        fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
  }
  // The descriptor still refers to the renamed file.
  if (::lseek(fd, 0, SEEK_END) < 0) {
    ::close(fd);
    return ErrnoError("seek", path);
  }
  return std::unique_ptr<ResultsWriter>(new ResultsWriter(fd));
}

absl::StatusOr<std::unique_ptr<ResultsWriter>> ResultsWriter::Append(
    const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDWR | O_CLOEXEC);
  if (fd < 0) return ErrnoError("cannot open", path);
  off_t end = ::lseek(fd, 0, SEEK_END);
  // Drop an unterminated tail left by an interrupted write.
  off_t keep = end;
  char c = 0;
  while (keep > 0) {
    if (::pread(fd, &c, 1, keep - 1) != 1) {
      ::close(fd);
      return ErrnoError("read", path);
    }
    if (c == '\n') break;
    --keep;
  }
  if (keep == 0) {
    ::close(fd);
    return absl::DataLossError(fmt::format("{}: missing header", path.string()));
  }
  if (keep != end && ::ftruncate(fd, keep) != 0) {
    ::close(fd);
    return ErrnoError("cannot truncate", path);
  }
  if (::lseek(fd, 0, SEEK_END) < 0) {
    ::close(fd);
    return ErrnoError("seek", path);
  }
  return std::unique_ptr<ResultsWriter>(new ResultsWriter(fd));
}

ResultsWriter::~ResultsWriter() {
  ::fsync(fd_);
  ::close(fd_);
}

absl::Status ResultsWriter::Write(const SampleMetrics& record) {
  return WriteAll(fd_, SampleMetricsToLine(record) + "\n");
}

}  // namespace vqaprobe
