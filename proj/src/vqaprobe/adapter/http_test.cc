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

#include <atomic>

#include "gtest/gtest.h"
#include "httplib.h"
#include "vqaprobe/adapter/conformance.h"
#include "vqaprobe/adapter/decorators.h"
#include "vqaprobe/adapter/http_adapter.h"
#include "vqaprobe/adapter/server.h"
#include "vqaprobe/adapter/stubs.h"
#include "vqaprobe/core/image.h"

namespace vqaprobe {
namespace {

std::string SmallPng() { return *EncodePng(Image(8, 8, 3, 0.25f)); }

// Free port with nothing listening.
int DeadPort() {
  httplib::Server s;
  const int port = s.bind_to_any_port("127.0.0.1");
  return port;
}

TEST(Http, StubRoundTripMatchesInProcess) {
  auto stub = MakeStub(StubKind::kQuestionOnly);
  AdapterServer server(*stub);
  ASSERT_TRUE(server.Start().ok());
  HttpAdapter remote(server.url());

  auto caps = remote.GetCapabilities();
  ASSERT_TRUE(caps.ok()) << caps.status();
  EXPECT_EQ(*caps, *stub->GetCapabilities());

  PredictRequest r;
  r.image = SmallPng();
  r.question = "what color is the car";
  auto remote_answer = remote.Predict(r);
  ASSERT_TRUE(remote_answer.ok()) << remote_answer.status();
  EXPECT_EQ(*remote_answer, *stub->Predict(r));

  auto features = remote.ExtractImageFeatures(SmallPng());
  ASSERT_TRUE(features.ok());
  EXPECT_EQ(*features, *stub->ExtractImageFeatures(SmallPng()));
  auto embedding = remote.ExtractQuestionEmbedding("what color");
  ASSERT_TRUE(embedding.ok());
  EXPECT_EQ(*embedding, *stub->ExtractQuestionEmbedding("what color"));
  EXPECT_EQ(AdapterErrorCodeOf(remote.ExtractQuestionEmbedding("").status()),
            AdapterErrorCode::kBadRequest);
}

TEST(Http, InvalidRequestNeverReachesTheNetwork) {
  auto stub = MakeStub(StubKind::kConstant);
  AdapterServer server(*stub);
  ASSERT_TRUE(server.Start().ok());
  HttpAdapter remote(server.url());
  PredictRequest both;
  both.image = SmallPng();
  both.features = FeatureMatrix(4, 16);
  both.question = "q";
  EXPECT_EQ(AdapterErrorCodeOf(remote.Predict(both).status()),
            AdapterErrorCode::kBadRequest);
  EXPECT_EQ(server.request_count(), 0u);
}

TEST(Http, CapabilityMissingTravelsOverTheWire) {
  StubOptions options;
  options.supports = {Capability::kRawPredict};
  StubAdapter stub(options);
  AdapterServer server(stub);
  ASSERT_TRUE(server.Start().ok());
  HttpAdapter remote(server.url());
  auto m = remote.ExtractImageFeatures(SmallPng());
  EXPECT_EQ(AdapterErrorCodeOf(m.status()), AdapterErrorCode::kCapabilityMissing);
  // Not retried.
  EXPECT_EQ(server.request_count(), 1u);
}

TEST(Http, UnreachableAdapterFailsFast) {
  HttpAdapter remote(fmt::format("http://127.0.0.1:{}", DeadPort()),
                     {std::chrono::milliseconds(500), 1});
  auto caps = remote.GetCapabilities();
  EXPECT_EQ(AdapterErrorCodeOf(caps.status()), AdapterErrorCode::kUnavailable);
}

TEST(Http, RetriesOnceAfterServerError) {
  httplib::Server flaky;
  std::atomic<int> calls{0};
  flaky.Get("/capabilities", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      res.set_content(R"({"error":"unavailable","message":"warming up"})",
                      "application/json");
      return;
    }
    res.set_content(R"({"model_name":"m","supports":["raw_predict"]})",
                    "application/json");
  });
  const int port = flaky.bind_to_any_port("127.0.0.1");
  std::thread t([&] { flaky.listen_after_bind(); });
  flaky.wait_until_ready();
  HttpAdapter remote(fmt::format("http://127.0.0.1:{}", port));
  auto caps = remote.GetCapabilities();
  EXPECT_TRUE(caps.ok()) << caps.status();
  EXPECT_EQ(calls.load(), 2);

  flaky.stop();
  t.join();
}

TEST(Http, ProtocolViolationsAreReported) {
  httplib::Server bad;
  bad.Post("/predict", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"topk":[{"answer":"a","prob":0.1},{"answer":"b","prob":0.9}]})",
                    "application/json");
  });
  const int port = bad.bind_to_any_port("127.0.0.1");
  std::thread t([&] { bad.listen_after_bind(); });
  bad.wait_until_ready();
  HttpAdapter remote(fmt::format("http://127.0.0.1:{}", port));
  PredictRequest r;
  r.image = "x";
  r.question = "q";
  EXPECT_EQ(AdapterErrorCodeOf(remote.Predict(r).status()),
            AdapterErrorCode::kProtocolError);
  bad.stop();
  t.join();
}

TEST(Conformance, EveryStubPasses) {
  for (StubKind kind : {StubKind::kConstant, StubKind::kQuestionOnly,
                        StubKind::kImageOnly, StubKind::kDropoutSim,
                        StubKind::kThreshold}) {
    auto stub = MakeStub(kind);
    AdapterServer server(*stub);
    ASSERT_TRUE(server.Start().ok());
    const ConformanceReport report = RunConformance(server.url());
    EXPECT_TRUE(report.passed()) << StubKindName(kind) << "\n" << report.ToText();
    EXPECT_GE(report.checks.size(), 12u);
  }
}

TEST(Conformance, PartialCapabilitiesPass) {
  StubOptions options;
  options.kind = StubKind::kQuestionOnly;
  options.supports = {Capability::kRawPredict, Capability::kQuestionEmbedding,
                      Capability::kPredictComposed};
  StubAdapter stub(options);
  AdapterServer server(stub);
  ASSERT_TRUE(server.Start().ok());
  const ConformanceReport report = RunConformance(server.url());
  EXPECT_TRUE(report.passed()) << report.ToText();
}

// Wraps the constant stub but returns its top-k in ascending order.
class UnorderedAdapter : public StubAdapter {
 public:
  UnorderedAdapter() : StubAdapter(StubOptions{}) {}
  absl::StatusOr<PredictResponse> Predict(const PredictRequest&) override {
    return PredictResponse{{{"no", 0.2}, {"yes", 0.8}}};
  }
};

TEST(Conformance, TopkOrderingViolationIsNamed) {
  UnorderedAdapter adapter;
  AdapterServer server(adapter);
  ASSERT_TRUE(server.Start().ok());
  const ConformanceReport report = RunConformance(server.url());
  EXPECT_FALSE(report.passed());
  const ConformanceCheck* check = report.Find("topk ordering");
  ASSERT_NE(check, nullptr);
  EXPECT_FALSE(check->passed);
  EXPECT_TRUE(report.Find("probability range")->passed);
}

TEST(Conformance, UnreachableReportsConnectionFailure) {
  const ConformanceReport report = RunConformance(
      fmt::format("http://127.0.0.1:{}", DeadPort()), std::chrono::milliseconds(500));
  ASSERT_EQ(report.checks.size(), 1u);
  EXPECT_EQ(report.checks[0].name, "connection");
  EXPECT_FALSE(report.passed());
}

TEST(Decorators, RecordingAndSerializedForward) {
  auto stub = MakeStub(StubKind::kConstant);
  SerializedAdapter serialized(*stub);
  RecordingAdapter recording(serialized);
  PredictRequest r;
  r.image = "x";
  r.question = "q";
  r.dropout = true;
  ASSERT_TRUE(recording.Predict(r).ok());
  ASSERT_TRUE(recording.ExtractQuestionEmbedding("a b").ok());
  const auto log = recording.log();
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].endpoint, "predict");
  EXPECT_EQ(log[0].capability, Capability::kRawPredict);
  EXPECT_TRUE(log[0].dropout);
  EXPECT_EQ(log[1].capability, Capability::kQuestionEmbedding);
  recording.Clear();
  EXPECT_EQ(recording.size(), 0u);
}

}  // namespace
}  // namespace vqaprobe
