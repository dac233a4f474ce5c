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

#include "vqaprobe/store/records.h"

#include <set>

#include "fmt/format.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

const std::set<std::string>& KnownKeys() {
  static const auto* keys = new std::set<std::string>{
      "sample_id", "image_ref", "question", "answers",
      "original",  "accuracy",  "error",    "metrics"};
  return *keys;
}

json TopKToJson(const std::vector<ScoredAnswer>& topk) {
  json out = json::array();
  for (const ScoredAnswer& a : topk) {
    out.push_back({{"answer", a.answer}, {"prob", a.prob}});
  }
  return out;
}

absl::StatusOr<std::vector<ScoredAnswer>> TopKFromJson(const json& j) {
  if (!j.is_array()) return absl::InvalidArgumentError("top-k must be an array");
  std::vector<ScoredAnswer> out;
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("answer") || !e["answer"].is_string() ||
        !e.contains("prob") || !e["prob"].is_number()) {
      return absl::InvalidArgumentError("top-k entry needs answer and prob");
    }
    out.push_back({e["answer"].get<std::string>(), e["prob"].get<double>()});
  }
  return out;
}

json TrialToJson(const TrialRecord& t) {
  json j = {{"trial", t.trial_index},
            {"perturbation", t.perturbation},
            {"answer", t.answer},
            {"unchanged", t.unchanged}};
  if (t.fallback) j["fallback"] = true;
  if (!t.topk.empty()) j["topk"] = TopKToJson(t.topk);
  return j;
}

absl::StatusOr<TrialRecord> TrialFromJson(MetricId kind, const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("trial must be an object");
  TrialRecord t;
  t.kind = kind;
  try {
    t.trial_index = j.at("trial").get<int>();
    t.perturbation = j.at("perturbation").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    t.unchanged = j.at("unchanged").get<bool>();
    t.fallback = j.value("fallback", false);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(fmt::format("trial: {}", e.what()));
  }
  if (j.contains("topk")) {
    absl::StatusOr<std::vector<ScoredAnswer>> topk = TopKFromJson(j["topk"]);
    if (!topk.ok()) return topk.status();
    t.topk = *std::move(topk);
  }
  return t;
}

json OutcomeToJson(const MetricOutcome& o) {
  json j = {{"value", nullptr}, {"reason", o.reason}, {"errored", o.errored}};
  if (o.result) {
    j["value"] = o.result->value;
    json trials = json::array();
    for (const TrialRecord& t : o.result->trials) trials.push_back(TrialToJson(t));
    j["trials"] = std::move(trials);
    if (o.result->mean_top1_prob) j["mean_top1_prob"] = *o.result->mean_top1_prob;
  }
  return j;
}

absl::StatusOr<MetricOutcome> OutcomeFromJson(MetricId id, const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("metric must be an object");
  MetricOutcome o;
  o.reason = j.value("reason", "");
  o.errored = j.value("errored", false);
  const json value = j.value("value", json());
  if (value.is_null()) return o;
  if (!value.is_number()) return absl::InvalidArgumentError("value must be a number");
  MetricResult r;
  r.value = value.get<double>();
  if (r.value < 0.0 || r.value > 100.0) {
    return absl::InvalidArgumentError(
        fmt::format("value {} outside [0,100]", r.value));
  }
  for (const json& t : j.value("trials", json::array())) {
    absl::StatusOr<TrialRecord> trial = TrialFromJson(id, t);
    if (!trial.ok()) return trial.status();
    r.trials.push_back(*std::move(trial));
  }
  if (j.contains("mean_top1_prob")) {
    r.mean_top1_prob = j["mean_top1_prob"].get<double>();
  }
  o.result = std::move(r);
  return o;
}

}  // namespace

json SampleMetricsToJson(const SampleMetrics& m) {
  json j = m.extra.is_object() ? m.extra : json::object();
  j["sample_id"] = m.sample_id;
  j["image_ref"] = m.image_ref;
  j["question"] = m.question;
  json answers = json::array();
  for (const AnswerScore& a : m.answers) {
    answers.push_back({{"answer", a.answer}, {"score", a.score}});
  }
  j["answers"] = std::move(answers);
  j["original"] = TopKToJson(m.original.topk);
  j["accuracy"] = m.accuracy ? json(*m.accuracy) : json(nullptr);
  if (m.error) j["error"] = *m.error;
  json metrics = j.value("metrics", json::object());
  if (!metrics.is_object()) metrics = json::object();
  for (MetricId id : kTrialMetrics) {
    metrics[std::string(MetricIdName(id))] = OutcomeToJson(m.outcome(id));
  }
  j["metrics"] = std::move(metrics);
  return j;
}

absl::StatusOr<SampleMetrics> SampleMetricsFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("record must be an object");
  SampleMetrics m;
  try {
    m.sample_id = j.at("sample_id").get<std::string>();
    m.image_ref = j.value("image_ref", "");
    m.question = j.at("question").get<std::string>();
    for (const json& a : j.value("answers", json::array())) {
      m.answers.push_back(
          {a.at("answer").get<std::string>(), a.at("score").get<double>()});
    }
    if (j.contains("accuracy") && !j["accuracy"].is_null()) {
      m.accuracy = j["accuracy"].get<double>();
    }
    if (j.contains("error")) m.error = j["error"].get<std::string>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(e.what());
  }
  if (m.sample_id.empty()) return absl::InvalidArgumentError("empty sample_id");
  absl::StatusOr<std::vector<ScoredAnswer>> original =
      TopKFromJson(j.value("original", json::array()));
  if (!original.ok()) return original.status();
  m.original.topk = *std::move(original);

  const json metrics = j.value("metrics", json::object());
  if (!metrics.is_object()) return absl::InvalidArgumentError("metrics must be an object");
  for (MetricId id : kTrialMetrics) {
    const std::string name(MetricIdName(id));
    if (!metrics.contains(name)) {
      m.outcome(id) = MetricOutcome::Null("not recorded");
      continue;
    }
    absl::StatusOr<MetricOutcome> o = OutcomeFromJson(id, metrics[name]);
    if (!o.ok()) {
      return absl::InvalidArgumentError(
          fmt::format("{}: {}", name, std::string(o.status().message())));
    }
    m.outcome(id) = *std::move(o);
  }
  for (const auto& [key, value] : metrics.items()) {
    if (!ParseMetricId(key)) m.extra["metrics"][key] = value;
  }
  for (const auto& [key, value] : j.items()) {
    if (!KnownKeys().contains(key)) m.extra[key] = value;
  }
  return m;
}

std::string SampleMetricsToLine(const SampleMetrics& m) {
  return SampleMetricsToJson(m).dump(-1, ' ', false,
                                     json::error_handler_t::replace);
}

}  // namespace vqaprobe
