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

#ifndef VQAPROBE_APP_API_H_
#define VQAPROBE_APP_API_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "vqaprobe/store/index.h"

namespace httplib {
class Server;
}

namespace vqaprobe {

using QueryParams = std::multimap<std::string, std::string>;

// Read-only views over an index. Errors: InvalidArgument for bad parameters,
// NotFound for unknown models, datasets, metrics or samples.
nlohmann::json ApiModels(const ResultsIndex& index);
nlohmann::json ApiOverview(const ResultsIndex& index);
absl::StatusOr<nlohmann::json> ApiHistogram(const ResultsIndex& index,
                                            const QueryParams& params);
absl::StatusOr<nlohmann::json> ApiFilter(const ResultsIndex& index,
                                         const QueryParams& params);
absl::StatusOr<nlohmann::json> ApiSample(const ResultsIndex& index,
                                         const QueryParams& params);
// Path of the image behind /api/image?dataset&id, confined to the image
// root recorded in the run header.
absl::StatusOr<std::filesystem::path> ApiImagePath(const ResultsIndex& index,
                                                   const QueryParams& params);

std::string ImageUrl(std::string_view dataset, std::string_view sample_id);
int HttpStatusOf(const absl::Status& status);

struct ApiServerOptions {
  std::filesystem::path results_dir;
  std::optional<std::filesystem::path> static_dir;
  uint64_t max_image_bytes = 16 << 20;
};

class ApiServer {
 public:
  explicit ApiServer(ApiServerOptions options);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Rebuilds the index from disk. The previous index stays live on failure.
  absl::Status Reload();
  std::shared_ptr<const ResultsIndex> index() const;

  absl::StatusOr<int> Start(const std::string& host = "127.0.0.1", int port = 0);
  void Stop();
  std::string url() const;

 private:
  void Register();

  ApiServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  mutable std::mutex mu_;
  std::shared_ptr<const ResultsIndex> index_;
  std::string host_;
  int port_ = 0;
};

}  // namespace vqaprobe

#endif  // VQAPROBE_APP_API_H_
