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

#include "vqaprobe/adapter/server.h"

#include "absl/strings/escaping.h"
#include "fmt/format.h"
#include "httplib.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  Reply(res, HttpStatusFor(AdapterErrorCodeOf(status)), ErrorToJson(status));
}

absl::StatusOr<json> ParseBody(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    return AdapterError(AdapterErrorCode::kBadRequest,
                        "request body must be a JSON object");
  }
  return body;
}

}  // namespace

AdapterServer::AdapterServer(Adapter& adapter)
    : adapter_(adapter), server_(std::make_unique<httplib::Server>()) {
  Register();
}

AdapterServer::~AdapterServer() { Stop(); }

void AdapterServer::Register() {
  server_->Get("/capabilities", [this](const httplib::Request&,
                                       httplib::Response& res) {
    ++requests_;
    absl::StatusOr<ModelCapabilities> caps = adapter_.GetCapabilities();
    if (!caps.ok()) return ReplyError(res, caps.status());
    Reply(res, 200, CapabilitiesToJson(*caps));
  });

  server_->Post("/predict", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    ++requests_;
    absl::StatusOr<json> body = ParseBody(req);
    if (!body.ok()) return ReplyError(res, body.status());
    absl::StatusOr<PredictRequest> request = RequestFromJson(*body);
    if (!request.ok()) return ReplyError(res, request.status());
    absl::StatusOr<PredictResponse> response = adapter_.Predict(*request);
    if (!response.ok()) return ReplyError(res, response.status());
    Reply(res, 200, ResponseToJson(*response));
  });

  server_->Post("/image-features", [this](const httplib::Request& req,
                                          httplib::Response& res) {
    ++requests_;
    absl::StatusOr<json> body = ParseBody(req);
    if (!body.ok()) return ReplyError(res, body.status());
    std::string image;
    if (!body->contains("image_b64") || !(*body)["image_b64"].is_string() ||
        !absl::Base64Unescape((*body)["image_b64"].get<std::string>(), &image)) {
      return ReplyError(res, AdapterError(AdapterErrorCode::kBadRequest,
                                          "\"image_b64\" must be base64 text"));
    }
    absl::StatusOr<FeatureMatrix> m = adapter_.ExtractImageFeatures(image);
    if (!m.ok()) return ReplyError(res, m.status());
    Reply(res, 200, {{"features", MatrixToJson(*m)}});
  });

  server_->Post("/question-embedding", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    ++requests_;
    absl::StatusOr<json> body = ParseBody(req);
    if (!body.ok()) return ReplyError(res, body.status());
    if (!body->contains("question") || !(*body)["question"].is_string()) {
      return ReplyError(res, AdapterError(AdapterErrorCode::kBadRequest,
                                          "\"question\" must be a string"));
    }
    absl::StatusOr<EmbeddingMatrix> m = adapter_.ExtractQuestionEmbedding(
        (*body)["question"].get<std::string>());
    if (!m.ok()) return ReplyError(res, m.status());
    Reply(res, 200, {{"embedding", MatrixToJson(*m)}});
  });

  server_->set_exception_handler([](const httplib::Request&,
                                    httplib::Response& res,
                                    std::exception_ptr ep) {
    std::string what = "unhandled exception";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    ReplyError(res, AdapterError(AdapterErrorCode::kInternal, what));
  });
}

absl::StatusOr<int> AdapterServer::Start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    return absl::UnavailableError(
        fmt::format("cannot bind {}:{}", host, port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void AdapterServer::Wait() {
  if (thread_.joinable()) thread_.join();
}

void AdapterServer::Stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string AdapterServer::url() const {
  return fmt::format("http://{}:{}", host_, port_);
}

}  // namespace vqaprobe
