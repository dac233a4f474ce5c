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

#include <signal.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "vqaprobe/adapter/conformance.h"
#include "vqaprobe/adapter/http_adapter.h"
#include "vqaprobe/adapter/server.h"
#include "vqaprobe/adapter/stubs.h"
#include "vqaprobe/app/api.h"
#include "vqaprobe/core/dataset.h"
#include "vqaprobe/perturbation/calibration.h"
#include "vqaprobe/store/runner.h"
#include "vqaprobe/testing/fixtures.h"

namespace vqaprobe {
namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

int Fail(const absl::Status& status) {
  std::cerr << "vqaprobe: " << std::string(status.message()) << "\n";
  return kRuntimeError;
}

int Usage(const std::string& message) {
  std::cerr << "vqaprobe: " << message << "\n";
  return kUsageError;
}

// Blocks SIGINT and SIGTERM so worker threads never see them; the main
// thread collects them with sigwait.
sigset_t BlockStopSignals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

void WaitForStopSignal(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}

struct AdapterFlags {
  std::string url;
  int timeout_ms = 60'000;
  int retries = 1;

  void Add(CLI::App* cmd) {
    cmd->add_option("--model-url", url, "Adapter base URL")->required();
    cmd->add_option("--timeout-ms", timeout_ms, "Per-request timeout")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--retries", retries, "Retries after transport failures")
        ->check(CLI::NonNegativeNumber);
  }
  HttpAdapter Make() const {
    return HttpAdapter(url, {std::chrono::milliseconds(timeout_ms), retries});
  }
};

struct RunFlags {
  AdapterFlags adapter;
  std::string dataset;
  std::string image_root;
  std::string out;
  uint64_t seed = 0;
  int trials = 10;
  int64_t max_samples = 15000;
  int parallelism = 4;
  int calibration_vectors = kDefaultCalibrationVectors;
  int64_t limit = -1;
  double sigma = NoiseSpec{}.sigma;
  double amount = NoiseSpec{}.amount;
  double salt_ratio = NoiseSpec{}.salt_ratio;
  double peak = NoiseSpec{}.peak;
  double feature_scale = 1.0;
  double question_scale = 1.0;
  std::string uncertainty = "one_minus_max";
  std::vector<std::string> metrics;
  std::vector<std::string> disable;
  bool quiet = false;
};

absl::StatusOr<RunConfig> ToConfig(const RunFlags& f) {
  RunConfig c;
  c.model_url = f.adapter.url;
  c.dataset = f.dataset;
  if (!f.image_root.empty()) c.image_root = f.image_root;
  c.out_dir = f.out;
  c.seed = f.seed;
  c.metrics.trials = f.trials;
  c.metrics.noise.sigma = f.sigma;
  c.metrics.noise.amount = f.amount;
  c.metrics.noise.salt_ratio = f.salt_ratio;
  c.metrics.noise.peak = f.peak;
  c.metrics.feature_noise_scale = f.feature_scale;
  c.metrics.question_noise_scale = f.question_scale;
  std::optional<UncertaintyStatistic> stat = ParseUncertaintyStatistic(f.uncertainty);
  if (!stat) {
    return absl::InvalidArgumentError(
        fmt::format("unknown uncertainty statistic '{}'", f.uncertainty));
  }
  c.metrics.uncertainty_statistic = *stat;
  auto parse_list = [](const std::vector<std::string>& names)
      -> absl::StatusOr<std::set<MetricId>> {
    std::set<MetricId> out;
    for (const std::string& n : names) {
      std::optional<MetricId> id = ParseMetricId(n);
      if (!id || *id == MetricId::kAccuracy) {
        return absl::InvalidArgumentError(fmt::format("unknown metric '{}'", n));
      }
      out.insert(*id);
    }
    return out;
  };
  if (!f.metrics.empty()) {
    absl::StatusOr<std::set<MetricId>> enabled = parse_list(f.metrics);
    if (!enabled.ok()) return enabled.status();
    c.metrics.enabled = *enabled;
  }
  absl::StatusOr<std::set<MetricId>> disabled = parse_list(f.disable);
  if (!disabled.ok()) return disabled.status();
  for (MetricId id : *disabled) c.metrics.enabled.erase(id);
  c.max_samples = f.max_samples;
  c.parallelism = f.parallelism;
  c.calibration_vectors = f.calibration_vectors;
  if (f.limit >= 0) c.limit = f.limit;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

int CmdRun(const RunFlags& f) {
  absl::StatusOr<RunConfig> config = ToConfig(f);
  if (!config.ok()) return Usage(std::string(config.status().message()));
  HttpAdapter adapter = f.adapter.Make();
  ProgressFn progress;
  if (!f.quiet) {
    progress = [](int64_t done, int64_t total) {
      std::cerr << fmt::format("\r{}/{} samples", done, total) << std::flush;
    };
  }
  absl::StatusOr<RunSummary> s = RunEvaluation(*config, adapter, progress);
  if (!f.quiet) std::cerr << "\n";
  if (!s.ok()) return Fail(s.status());
  std::cout << fmt::format(
      "{}: {} evaluated ({} with errors), {} already present, {} left\n",
      s->results.string(), s->evaluated, s->errored, s->skipped, s->pending);
  if (s->corrupt_lines > 0) {
    std::cerr << fmt::format("warning: {} corrupt lines were ignored\n",
                             s->corrupt_lines);
  }
  return 0;
}

struct CalibrateFlags {
  AdapterFlags adapter;
  std::string dataset;
  std::string image_root;
  std::string out;
  std::string output;
  uint64_t seed = 0;
  int64_t max_samples = 15000;
  int vectors = kDefaultCalibrationVectors;
};

int CmdCalibrate(const CalibrateFlags& f) {
  if (f.out.empty() == f.output.empty()) {
    return Usage("calibrate needs exactly one of --out and --output");
  }
  RunConfig c;
  c.dataset = f.dataset;
  if (!f.image_root.empty()) c.image_root = f.image_root;
  c.seed = f.seed;
  c.max_samples = f.max_samples;
  HttpAdapter adapter = f.adapter.Make();
  absl::StatusOr<ModelCapabilities> caps = adapter.GetCapabilities();
  if (!caps.ok()) return Fail(caps.status());
  if (!caps->Has(Capability::kImageFeatures) &&
      !caps->Has(Capability::kQuestionEmbedding)) {
    return Fail(absl::FailedPreconditionError(
        "the adapter exposes neither image_features nor question_embedding"));
  }
  absl::StatusOr<DatasetManifest> dataset = LoadRunDataset(c);
  if (!dataset.ok()) return Fail(dataset.status());
  absl::StatusOr<CalibrationFile> calib =
      ComputeCalibration(adapter, *caps, *dataset, f.seed, f.vectors);
  if (!calib.ok()) return Fail(calib.status());
  const std::filesystem::path path =
      f.output.empty() ? CalibrationPath(f.out, caps->model_name, dataset->name)
                       : std::filesystem::path(f.output);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (absl::Status s = WriteCalibrationFile(*calib, path); !s.ok()) return Fail(s);
  std::cout << path.string() << "\n";
  return 0;
}

struct ServeFlags {
  std::string results;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  uint64_t max_image_bytes = 16 << 20;
};

int CmdServe(ServeFlags f) {
  if (const char* env = std::getenv("VQAPROBE_RESULTS"); env && *env) {
    f.results = env;
  }
  if (f.results.empty()) return Usage("serve needs --results or VQAPROBE_RESULTS");
  ApiServerOptions options;
  options.results_dir = f.results;
  if (!f.static_dir.empty()) options.static_dir = f.static_dir;
  options.max_image_bytes = f.max_image_bytes;
  const sigset_t signals = BlockStopSignals();
  ApiServer server(options);
  if (absl::Status s = server.Reload(); !s.ok()) return Fail(s);
  for (const IndexProblem& p : server.index()->problems()) {
    std::cerr << fmt::format("warning: {}: {}\n", p.file.string(), p.error);
  }
  absl::StatusOr<int> port = server.Start(f.host, f.port);
  if (!port.ok()) return Fail(port.status());
  std::cout << fmt::format("serving {} on {}\n", f.results, server.url()) << std::flush;
  WaitForStopSignal(signals);
  server.Stop();
  return 0;
}

struct SubsampleFlags {
  std::string dataset;
  std::string output;
  int64_t max_n = 15000;
  uint64_t seed = 0;
};

int CmdSubsample(const SubsampleFlags& f) {
  absl::StatusOr<DatasetManifest> d = LoadManifest(f.dataset);
  if (!d.ok()) return Fail(d.status());
  if (f.max_n < 1) return Usage("--max-n must be >= 1");
  const DatasetManifest subset = Subsample(*d, {.max_n = f.max_n, .seed = f.seed});
  if (absl::Status s = WriteManifest(subset, f.output); !s.ok()) return Fail(s);
  std::cout << fmt::format("{}: {} of {} samples\n", f.output, subset.samples.size(),
                           d->samples.size());
  return 0;
}

struct StubFlags {
  std::string kind = "constant";
  std::string dropout_mode = "noisy";
  double threshold = 0.5;
  std::string model_name;
  int64_t parameter_count = -1;
  std::vector<std::string> capabilities;
  std::string host = "127.0.0.1";
  int port = 0;
};

int CmdStub(const StubFlags& f) {
  StubOptions options;
  std::optional<StubKind> kind = ParseStubKind(f.kind);
  if (!kind) return Usage(fmt::format("unknown stub kind '{}'", f.kind));
  options.kind = *kind;
  std::optional<DropoutMode> mode = ParseDropoutMode(f.dropout_mode);
  if (!mode) return Usage(fmt::format("unknown dropout mode '{}'", f.dropout_mode));
  options.dropout_mode = *mode;
  options.threshold = f.threshold;
  options.model_name = f.model_name;
  if (f.parameter_count >= 0) options.parameter_count = f.parameter_count;
  if (!f.capabilities.empty()) {
    options.supports.clear();
    for (const std::string& name : f.capabilities) {
      std::optional<Capability> c = ParseCapability(name);
      if (!c) return Usage(fmt::format("unknown capability '{}'", name));
      options.supports.insert(*c);
    }
  }
  StubAdapter stub(options);
  absl::StatusOr<ModelCapabilities> caps = stub.GetCapabilities();
  if (!caps.ok()) return Fail(caps.status());
  if (absl::Status s = caps->Validate(); !s.ok()) return Usage(std::string(s.message()));
  const sigset_t signals = BlockStopSignals();
  AdapterServer server(stub);
  absl::StatusOr<int> port = server.Start(f.host, f.port);
  if (!port.ok()) return Fail(port.status());
  std::cout << fmt::format("{} listening on {}\n", caps->model_name, server.url())
            << std::flush;
  WaitForStopSignal(signals);
  server.Stop();
  return 0;
}

struct ConformanceFlags {
  std::string url;
  int timeout_ms = 60'000;
  bool json = false;
};

int CmdConformance(const ConformanceFlags& f) {
  const ConformanceReport report =
      RunConformance(f.url, std::chrono::milliseconds(f.timeout_ms));
  if (f.json) {
    std::cout << report.ToJson().dump(2) << "\n";
  } else {
    std::cout << report.ToText();
  }
  return report.passed() ? 0 : kRuntimeError;
}

struct FixtureFlags {
  std::string out;
  std::string name = "tiny";
  int samples = 20;
};

int CmdFixture(const FixtureFlags& f) {
  if (f.samples < 1) return Usage("--samples must be >= 1");
  absl::StatusOr<DatasetManifest> d =
      testing::WriteFixtureDataset(f.out, f.name, f.samples);
  if (!d.ok()) return Fail(d.status());
  std::cout << (std::filesystem::path(f.out) / (f.name + ".json")).string() << "\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Model-agnostic VQA benchmarking harness", "vqaprobe"};
  app.set_version_flag("--version", VQAPROBE_VERSION);
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Evaluate a model on a dataset");
  run.adapter.Add(run_cmd);
  run_cmd->add_option("--dataset", run.dataset, "Dataset manifest (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--image-root", run.image_root,
                      "Directory image refs resolve against");
  run_cmd->add_option("--out", run.out, "Results directory")->required();
  run_cmd->add_option("--seed", run.seed, "Run seed");
  run_cmd->add_option("--trials", run.trials, "Trials per Monte-Carlo metric")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-samples", run.max_samples, "Subsample size")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--parallelism", run.parallelism, "Samples in flight")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--calibration-vectors", run.calibration_vectors,
                      "Vectors sampled for noise calibration");
  run_cmd->add_option("--limit", run.limit, "Stop after this many new samples");
  run_cmd->add_option("--sigma", run.sigma, "Gaussian and speckle sigma");
  run_cmd->add_option("--amount", run.amount, "Salt & pepper fraction");
  run_cmd->add_option("--salt-ratio", run.salt_ratio, "Salt share of altered pixels");
  run_cmd->add_option("--peak", run.peak, "Poisson photon count at intensity 1");
  run_cmd->add_option("--feature-noise-scale", run.feature_scale,
                      "Multiplier on calibrated feature std");
  run_cmd->add_option("--question-noise-scale", run.question_scale,
                      "Multiplier on calibrated embedding std");
  run_cmd->add_option("--uncertainty", run.uncertainty,
                      "one_minus_max or entropy");
  run_cmd->add_option("--metrics", run.metrics, "Metrics to run (default: all)")
      ->delimiter(',');
  run_cmd->add_option("--disable", run.disable, "Metrics to skip")->delimiter(',');
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  CalibrateFlags calibrate;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "Compute feature and embedding noise scales");
  calibrate.adapter.Add(calibrate_cmd);
  calibrate_cmd->add_option("--dataset", calibrate.dataset, "Dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--image-root", calibrate.image_root, "Image directory");
  calibrate_cmd->add_option("--out", calibrate.out,
                            "Results directory; writes <model>/<dataset>.calib.json");
  calibrate_cmd->add_option("--output", calibrate.output, "Explicit output file");
  calibrate_cmd->add_option("--seed", calibrate.seed, "Seed");
  calibrate_cmd->add_option("--max-samples", calibrate.max_samples, "Subsample size");
  calibrate_cmd->add_option("--vectors", calibrate.vectors, "Vectors to sample")
      ->check(CLI::Range(2, 1 << 30));

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Serve the results API");
  serve_cmd->add_option("--results", serve.results,
                        "Results directory (VQAPROBE_RESULTS overrides)");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks one)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /")
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--max-image-bytes", serve.max_image_bytes,
                        "Largest image served");

  SubsampleFlags subsample;
  CLI::App* subsample_cmd =
      app.add_subcommand("subsample", "Write a seeded uniform subset of a manifest");
  subsample_cmd->add_option("--dataset", subsample.dataset, "Input manifest")
      ->required()
      ->check(CLI::ExistingFile);
  subsample_cmd->add_option("--output", subsample.output, "Output manifest")->required();
  subsample_cmd->add_option("--max-n", subsample.max_n, "Subset size");
  subsample_cmd->add_option("--seed", subsample.seed, "Seed");

  StubFlags stub;
  CLI::App* stub_cmd = app.add_subcommand("stub", "Serve a built-in stub adapter");
  stub_cmd->add_option("--kind", stub.kind,
                       "constant, question_only, image_only, dropout_sim, threshold");
  stub_cmd->add_option("--dropout-mode", stub.dropout_mode,
                       "noisy, degenerate or alternating");
  stub_cmd->add_option("--threshold", stub.threshold, "Threshold stub cut-off");
  stub_cmd->add_option("--model-name", stub.model_name, "Reported model name");
  stub_cmd->add_option("--parameter-count", stub.parameter_count,
                       "Reported parameter count");
  stub_cmd->add_option("--capabilities", stub.capabilities,
                       "Declared capabilities (default: all)")
      ->delimiter(',');
  stub_cmd->add_option("--host", stub.host, "Bind address");
  stub_cmd->add_option("--port", stub.port, "Port (0 picks one)")
      ->check(CLI::Range(0, 65535));

  ConformanceFlags conformance;
  CLI::App* conformance_cmd =
      app.add_subcommand("conformance", "Check an adapter against the protocol");
  conformance_cmd->add_option("--url", conformance.url, "Adapter base URL")->required();
  conformance_cmd->add_option("--timeout-ms", conformance.timeout_ms,
                              "Per-request timeout")
      ->check(CLI::PositiveNumber);
  conformance_cmd->add_flag("--json", conformance.json, "JSON report");

  FixtureFlags fixture;
  CLI::App* fixture_cmd =
      app.add_subcommand("fixture", "Write the synthetic test dataset");
  fixture_cmd->add_option("--out", fixture.out, "Output directory")->required();
  fixture_cmd->add_option("--name", fixture.name, "Dataset name");
  fixture_cmd->add_option("--samples", fixture.samples, "Number of samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (*run_cmd) return CmdRun(run);
  if (*calibrate_cmd) return CmdCalibrate(calibrate);
  if (*serve_cmd) return CmdServe(serve);
  if (*subsample_cmd) return CmdSubsample(subsample);
  if (*stub_cmd) return CmdStub(stub);
  if (*conformance_cmd) return CmdConformance(conformance);
  if (*fixture_cmd) return CmdFixture(fixture);
  return kUsageError;
}

}  // namespace
}  // namespace vqaprobe

int main(int argc, char** argv) { return vqaprobe::Main(argc, argv); }
