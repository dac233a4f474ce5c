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

#ifndef VQAPROBE_ADAPTER_SERVER_H_
#define VQAPROBE_ADAPTER_SERVER_H_

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "absl/status/statusor.h"
#include "vqaprobe/adapter/adapter.h"

namespace httplib {
class Server;
}

namespace vqaprobe {

// Serves an Adapter over the HTTP wire protocol.
class AdapterServer {
 public:
  explicit AdapterServer(Adapter& adapter);
  ~AdapterServer();
  AdapterServer(const AdapterServer&) = delete;
  AdapterServer& operator=(const AdapterServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  absl::StatusOr<int> Start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks until Stop() is called from another thread or a signal handler.
  void Wait();
  void Stop();

  int port() const { return port_; }
  std::string url() const;
  // Requests handled so far, all endpoints.
  uint64_t request_count() const { return requests_.load(); }

 private:
  void Register();

  Adapter& adapter_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  std::atomic<uint64_t> requests_{0};
};

}  // namespace vqaprobe

#endif  // VQAPROBE_ADAPTER_SERVER_H_
