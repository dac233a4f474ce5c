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

#include "vqaprobe/store/runner.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "gtest/gtest.h"
#include "vqaprobe/adapter/decorators.h"
#include "vqaprobe/adapter/http_adapter.h"
#include "vqaprobe/adapter/stubs.h"
#include "vqaprobe/store/results_file.h"
#include "vqaprobe/testing/fixtures.h"

namespace vqaprobe {
namespace {

namespace fs = std::filesystem;

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("vqaprobe_runner_" +
             std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    ASSERT_TRUE(testing::WriteFixtureDataset(root_ / "data").ok());
  }
  void TearDown() override { fs::remove_all(root_); }

  RunConfig Config(const std::string& out) const {
    RunConfig c;
    c.model_url = "in-process";
    c.dataset = root_ / "data" / "tiny.json";
    c.out_dir = root_ / out;
    c.seed = 7;
    c.metrics.trials = 10;
    c.parallelism = 1;
    return c;
  }

  static std::vector<std::string> Lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
  }

  fs::path root_;
};

size_t NonCapabilityRequests(const RecordingAdapter& r) {
  size_t n = 0;
  for (const RequestLogEntry& e : r.log()) n += e.endpoint != "capabilities";
  return n;
}

TEST_F(RunnerTest, ConstantStubWritesHeaderAndOneLinePerSample) {
  auto stub = MakeStub(StubKind::kConstant);
  absl::StatusOr<RunSummary> s = RunEvaluation(Config("out"), *stub);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->results, root_ / "out" / "stub-constant" / "tiny.ndjson");
  EXPECT_EQ(Lines(s->results).size(), 21u);
  EXPECT_EQ(s->evaluated, 20);
  ASSERT_TRUE(s->calibration.has_value());
  EXPECT_TRUE(fs::exists(*s->calibration));

  absl::StatusOr<ResultsFile> f = ReadResultsFile(s->results, ReadMode::kStrict);
  ASSERT_TRUE(f.ok()) << f.status();
  EXPECT_EQ(f->header.capabilities["model_name"], "stub-constant");
  EXPECT_EQ(f->header.config["seed"], 7);
  EXPECT_EQ(f->header.calibration["file"], "tiny.calib.json");
  EXPECT_FALSE(f->header.created_at.empty());
  for (const SampleMetrics& m : f->records) {
    EXPECT_EQ(*m.Value(MetricId::kQuestionBias), 100.0);
    EXPECT_EQ(*m.Value(MetricId::kRobFeature), 100.0);
    EXPECT_EQ(*m.Value(MetricId::kUncertainty), 0.0);
  }
}

TEST_F(RunnerTest, RerunIssuesNoRequestsForCompletedSamples) {
  auto stub = MakeStub(StubKind::kDropoutSim);
  RecordingAdapter first(*stub);
  ASSERT_TRUE(RunEvaluation(Config("out"), first).ok());
  RecordingAdapter second(*stub);
  absl::StatusOr<RunSummary> s = RunEvaluation(Config("out"), second);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->skipped, 20);
  EXPECT_EQ(s->evaluated, 0);
  EXPECT_EQ(NonCapabilityRequests(second), 0u);
  EXPECT_EQ(Lines(s->results).size(), 21u);
}

TEST_F(RunnerTest, ResumeEvaluatesOnlyRemainingSamples) {
  auto stub = MakeStub(StubKind::kDropoutSim);
  RecordingAdapter full(*stub);
  absl::StatusOr<RunSummary> reference = RunEvaluation(Config("full"), full);
  ASSERT_TRUE(reference.ok()) << reference.status();

  RunConfig interrupted = Config("resumed");
  interrupted.limit = 10;
  RecordingAdapter before(*stub);
  absl::StatusOr<RunSummary> s = RunEvaluation(interrupted, before);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->evaluated, 10);
  EXPECT_EQ(s->pending, 10);

  RecordingAdapter after(*stub);
  s = RunEvaluation(Config("resumed"), after);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->skipped, 10);
  EXPECT_EQ(s->evaluated, 10);
  EXPECT_EQ(NonCapabilityRequests(after),
            NonCapabilityRequests(full) - NonCapabilityRequests(before));

  // The resumed session wrote exactly the samples the first one skipped.
  const auto partial = ReadResultsFile(s->results, ReadMode::kStrict);
  ASSERT_TRUE(partial.ok());
  std::set<std::string> ids;
  for (size_t i = 10; i < partial->records.size(); ++i) {
    ids.insert(partial->records[i].sample_id);
  }
  for (size_t i = 0; i < 10; ++i) {
    EXPECT_FALSE(ids.contains(partial->records[i].sample_id));
  }
  EXPECT_EQ(ids.size(), 10u);

  const auto ref = ReadResultsFile(reference->results, ReadMode::kStrict);
  const auto res = ReadResultsFile(s->results, ReadMode::kStrict);
  ASSERT_TRUE(ref.ok() && res.ok());
  EXPECT_EQ(res->records, ref->records);
  std::vector<std::string> ref_lines = Lines(reference->results);
  std::vector<std::string> res_lines = Lines(s->results);
  ASSERT_EQ(ref_lines.size(), res_lines.size());
  for (size_t i = 1; i < ref_lines.size(); ++i) EXPECT_EQ(ref_lines[i], res_lines[i]);
}

TEST_F(RunnerTest, ParallelismDoesNotChangeRecords) {
  auto stub = MakeStub(StubKind::kDropoutSim);
  RunConfig serial = Config("p1");
  RunConfig parallel = Config("p4");
  parallel.parallelism = 4;
  absl::StatusOr<RunSummary> a = RunEvaluation(serial, *stub);
  absl::StatusOr<RunSummary> b = RunEvaluation(parallel, *stub);
  ASSERT_TRUE(a.ok() && b.ok());
  const auto la = Lines(a->results);
  const auto lb = Lines(b->results);
  ASSERT_EQ(la.size(), lb.size());
  for (size_t i = 1; i < la.size(); ++i) EXPECT_EQ(la[i], lb[i]) << i;
  nlohmann::json ha = nlohmann::json::parse(la[0]);
  nlohmann::json hb = nlohmann::json::parse(lb[0]);
  ha.erase("created_at");
  hb.erase("created_at");
  EXPECT_EQ(ha, hb);
}

TEST_F(RunnerTest, ChangedConfigurationRefusesToResume) {
  auto stub = MakeStub(StubKind::kConstant);
  RunConfig c = Config("out");
  c.limit = 3;
  ASSERT_TRUE(RunEvaluation(c, *stub).ok());
  c.limit.reset();
  c.metrics.trials = 5;
  absl::StatusOr<RunSummary> s = RunEvaluation(c, *stub);
  EXPECT_EQ(s.status().code(), absl::StatusCode::kFailedPrecondition);
  // The endpoint may move between sessions.
  c.metrics.trials = 10;
  c.model_url = "http://elsewhere:1";
  EXPECT_TRUE(RunEvaluation(c, *stub).ok());
}

TEST_F(RunnerTest, UnreachableAdapterWritesNothing) {
  HttpAdapterOptions options;
  options.timeout = std::chrono::milliseconds(500);
  options.retries = 0;
  HttpAdapter adapter("http://127.0.0.1:1", options);
  RunConfig c = Config("out");
  c.model_url = "http://127.0.0.1:1";
  absl::StatusOr<RunSummary> s = RunEvaluation(c, adapter);
  EXPECT_EQ(s.status().code(), absl::StatusCode::kUnavailable) << s.status();
  EXPECT_FALSE(fs::exists(root_ / "out"));
}

TEST_F(RunnerTest, SampleFailuresAreRecordedAndTheRunContinues) {
  fs::remove(root_ / "data" / "images" / "tiny-0003.png");
  auto stub = MakeStub(StubKind::kConstant);
  absl::StatusOr<RunSummary> s = RunEvaluation(Config("out"), *stub);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->evaluated, 20);
  EXPECT_EQ(s->errored, 1);
  const auto f = ReadResultsFile(s->results, ReadMode::kStrict);
  int with_error = 0;
  for (const SampleMetrics& m : f->records) with_error += m.error.has_value();
  EXPECT_EQ(with_error, 1);
}

TEST_F(RunnerTest, SubsamplingCapsTheRun) {
  auto stub = MakeStub(StubKind::kConstant);
  RunConfig c = Config("out");
  c.max_samples = 6;
  absl::StatusOr<RunSummary> s = RunEvaluation(c, *stub);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->dataset_samples, 6);
  EXPECT_EQ(Lines(s->results).size(), 7u);
}

TEST_F(RunnerTest, CalibrationOnlyQueriesDeclaredCapabilities) {
  StubOptions options;
  options.supports = {Capability::kRawPredict, Capability::kImageFeatures,
                      Capability::kPredictComposed};
  StubAdapter stub(options);
  RecordingAdapter rec(stub);
  absl::StatusOr<RunSummary> s = RunEvaluation(Config("out"), rec);
  ASSERT_TRUE(s.ok()) << s.status();
  const auto calib = ReadCalibrationFile(*s->calibration);
  ASSERT_TRUE(calib.ok());
  EXPECT_TRUE(calib->image_features.has_value());
  EXPECT_FALSE(calib->question_embedding.has_value());
  EXPECT_EQ(calib->image_features->dim, kStubFeatureDim);
  // 20 images x 4 rows.
  EXPECT_EQ(calib->image_features->n_vectors, 80);
  for (const RequestLogEntry& e : rec.log()) {
    EXPECT_NE(e.endpoint, "question-embedding");
  }
}

}  // namespace
}  // namespace vqaprobe
