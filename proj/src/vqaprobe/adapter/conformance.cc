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

#include "vqaprobe/adapter/conformance.h"

#include <cmath>
#include <optional>

#include "absl/strings/escaping.h"
#include "fmt/format.h"
#include "httplib.h"
#include "vqaprobe/adapter/protocol.h"
#include "vqaprobe/core/image.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

struct Reply {
  int status = 0;
  json body;  // discarded when not JSON
};

class Probe {
 public:
  Probe(const std::string& url, std::chrono::milliseconds timeout)
      : client_(url) {
    const auto s = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto us =
        std::chrono::duration_cast<std::chrono::microseconds>(timeout - s);
    client_.set_connection_timeout(s.count(), us.count());
    client_.set_read_timeout(s.count(), us.count());
    client_.set_write_timeout(s.count(), us.count());
  }

  std::optional<Reply> Get(const std::string& path) {
    return Wrap(client_.Get(path));
  }
  std::optional<Reply> Post(const std::string& path, const std::string& body) {
    return Wrap(client_.Post(path, body, "application/json"));
  }
  std::string last_error() const { return last_error_; }

 private:
  std::optional<Reply> Wrap(httplib::Result res) {
    if (!res) {
      last_error_ = httplib::to_string(res.error());
      return std::nullopt;
    }
    return Reply{res->status,
                 json::parse(res->body, nullptr, /*allow_exceptions=*/false)};
  }

  httplib::Client client_;
  std::string last_error_;
};

std::string FixturePng() {
  Image image(8, 8, 3);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      image.at(x, y, 0) = x / 7.0f;
      image.at(x, y, 1) = y / 7.0f;
      image.at(x, y, 2) = (x + y) / 14.0f;
    }
  }
  return EncodePng(image).value_or(std::string());
}

std::string Base64(const std::string& bytes) {
  std::string out;
  absl::Base64Escape(bytes, &out);
  return out;
}

bool IsErrorBody(const json& j) {
  return j.is_object() && j.contains("error") && j["error"].is_string() &&
         j.contains("message") && j["message"].is_string();
}

bool IsCapabilityMissing(const Reply& r) {
  return r.status >= 400 && IsErrorBody(r.body) &&
         r.body["error"] == "capability_missing";
}

std::string Describe(const Reply& r) {
  return fmt::format("HTTP {}: {}", r.status,
                     r.body.is_discarded() ? "<non-JSON body>" : r.body.dump());
}

// Checks a 200 reply carrying a finite matrix under `key`.
std::string MatrixProblem(const std::optional<Reply>& r, const char* key) {
  if (!r) return "no response";
  if (r->status != 200) return Describe(*r);
  if (!r->body.is_object() || !r->body.contains(key)) {
    return fmt::format("missing \"{}\"", key);
  }
  absl::StatusOr<FeatureMatrix> m = MatrixFromJson<ImageFeatureTag>(r->body[key]);
  if (!m.ok()) return std::string(m.status().message());
  return "";
}

}  // namespace

bool ConformanceReport::passed() const {
  if (checks.empty()) return false;
  for (const ConformanceCheck& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const ConformanceCheck* ConformanceReport::Find(const std::string& name) const {
  for (const ConformanceCheck& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

json ConformanceReport::ToJson() const {
  json out = {{"url", url}, {"passed", passed()}, {"checks", json::array()}};
  for (const ConformanceCheck& c : checks) {
    out["checks"].push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return out;
}

std::string ConformanceReport::ToText() const {
  std::string out;
  for (const ConformanceCheck& c : checks) {
    out += c.passed ? fmt::format("PASS {}\n", c.name)
                    : fmt::format("FAIL {}: {}\n", c.name, c.detail);
  }
  return out;
}

ConformanceReport RunConformance(const std::string& url,
                                 std::chrono::milliseconds timeout) {
  ConformanceReport report;
  report.url = url;
  auto add = [&report](std::string name, std::string problem) {
    const bool ok = problem.empty();
    report.checks.push_back({std::move(name), ok, std::move(problem)});
  };

  Probe probe(url, timeout);
  std::optional<Reply> caps_reply = probe.Get("/capabilities");
  if (!caps_reply) {
    add("connection", fmt::format("cannot reach {}: {}", url, probe.last_error()));
    return report;
  }
  add("connection", "");

  absl::StatusOr<ModelCapabilities> caps =
      caps_reply->status == 200
          ? CapabilitiesFromJson(caps_reply->body)
          : absl::StatusOr<ModelCapabilities>(
                absl::InvalidArgumentError(Describe(*caps_reply)));
  add("capabilities schema",
      caps.ok() ? "" : std::string(caps.status().message()));
  ModelCapabilities declared =
      caps.ok() ? *caps : ModelCapabilities{"?", std::nullopt,
                                            {Capability::kRawPredict}, false};

  const std::string image_b64 = Base64(FixturePng());
  const std::string question = "What color is the car?";
  const json raw_request = {{"image_b64", image_b64},
                            {"question", question},
                            {"dropout", false},
                            {"top_k", kDefaultTopK}};

  // predict, topk ordering, probability range
  std::optional<Reply> first = probe.Post("/predict", raw_request.dump());
  std::optional<PredictResponse> response;
  if (!first) {
    add("predict", probe.last_error());
  } else if (first->status != 200) {
    add("predict", Describe(*first));
  } else if (absl::StatusOr<PredictResponse> r = ResponseFromJson(first->body);
             !r.ok()) {
    add("predict", std::string(r.status().message()));
  } else if (r->topk.empty()) {
    add("predict", "topk is empty");
  } else {
    add("predict", "");
    response = *r;
  }
  if (response) {
    std::string ordering, range;
    double sum = 0;
    for (size_t i = 0; i < response->topk.size(); ++i) {
      const double p = response->topk[i].prob;
      if (i > 0 && p > response->topk[i - 1].prob && ordering.empty()) {
        ordering = fmt::format("prob at position {} ({}) exceeds position {} ({})",
                               i, p, i - 1, response->topk[i - 1].prob);
      }
      if (!(p >= 0 && p <= 1) && range.empty()) {
        range = fmt::format("prob {} at position {} outside [0,1]", p, i);
      }
      sum += p;
    }
    if (range.empty() && sum > 1 + 1e-6) {
      range = fmt::format("probabilities sum to {}", sum);
    }
    add("topk ordering", ordering);
    add("probability range", range);

    std::optional<Reply> second = probe.Post("/predict", raw_request.dump());
    add("determinism",
        second && second->status == 200 && second->body == first->body
            ? ""
            : "identical requests gave different responses");
  } else {
    add("topk ordering", "no prediction to check");
    add("probability range", "no prediction to check");
    add("determinism", "no prediction to check");
  }

  // precondition rejection: both image sources at once
  json both = raw_request;
  both["features"] = json::array({json::array({0.0})});
  std::optional<Reply> rejected = probe.Post("/predict", both.dump());
  add("precondition rejection",
      !rejected ? probe.last_error()
      : rejected->status >= 400 && rejected->status < 500 &&
              IsErrorBody(rejected->body)
          ? ""
          : "request with image and features accepted or unstructured: " +
                Describe(*rejected));

  std::optional<Reply> malformed = probe.Post("/predict", "{not json");
  add("malformed request",
      !malformed ? probe.last_error()
      : malformed->status >= 400 && malformed->status < 500 &&
              IsErrorBody(malformed->body)
          ? ""
          : Describe(*malformed));

  // Optional capabilities.
  std::optional<json> features, embedding;
  {
    std::optional<Reply> r =
        probe.Post("/image-features", json{{"image_b64", image_b64}}.dump());
    if (declared.Has(Capability::kImageFeatures)) {
      std::string problem = MatrixProblem(r, "features");
      if (problem.empty()) {
        std::optional<Reply> again =
            probe.Post("/image-features", json{{"image_b64", image_b64}}.dump());
        if (!again || again->body != r->body) problem = "not deterministic";
        features = r->body["features"];
      }
      add("image_features", problem);
    } else {
      add("image_features", r && IsCapabilityMissing(*r)
                                ? ""
                                : "undeclared capability did not answer "
                                  "capability_missing");
    }
  }
  {
    std::optional<Reply> r =
        probe.Post("/question-embedding", json{{"question", question}}.dump());
    if (declared.Has(Capability::kQuestionEmbedding)) {
      std::string problem = MatrixProblem(r, "embedding");
      if (problem.empty()) embedding = r->body["embedding"];
      add("question_embedding", problem);
    } else {
      add("question_embedding", r && IsCapabilityMissing(*r)
                                    ? ""
                                    : "undeclared capability did not answer "
                                      "capability_missing");
    }
  }
  {
    json composed = {{"dropout", false}, {"top_k", kDefaultTopK}};
    if (features) {
      composed["features"] = *features;
      composed["question"] = question;
    } else if (embedding) {
      composed["image_b64"] = image_b64;
      composed["embedding"] = *embedding;
    } else {
      composed["image_b64"] = image_b64;
      composed["embedding"] = json::array({json::array({0.0})});
    }
    std::optional<Reply> r = probe.Post("/predict", composed.dump());
    if (declared.Has(Capability::kPredictComposed)) {
      std::string problem;
      if (!r) {
        problem = probe.last_error();
      } else if (r->status != 200) {
        problem = Describe(*r);
      } else if (auto p = ResponseFromJson(r->body); !p.ok() || p->topk.empty()) {
        problem = "invalid topk";
      }
      add("predict_composed", problem);
    } else {
      add("predict_composed", r && IsCapabilityMissing(*r)
                                  ? ""
                                  : "undeclared capability did not answer "
                                    "capability_missing");
    }
  }
  {
    json dropout = raw_request;
    dropout["dropout"] = true;
    dropout["seed"] = 1;
    std::optional<Reply> r = probe.Post("/predict", dropout.dump());
    if (declared.Has(Capability::kDropout)) {
      std::string problem;
      if (!r) {
        problem = probe.last_error();
      } else if (r->status != 200) {
        problem = Describe(*r);
      } else if (auto p = ResponseFromJson(r->body); !p.ok() || !p->Validate().ok()) {
        problem = "invalid topk";
      }
      add("dropout", problem);
    } else {
      add("dropout", r && IsCapabilityMissing(*r)
                         ? ""
                         : "undeclared capability did not answer "
                           "capability_missing");
    }
  }
  return report;
}

}  // namespace vqaprobe
