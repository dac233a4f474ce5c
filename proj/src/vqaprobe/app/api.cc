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

#include "vqaprobe/app/api.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fmt/format.h"
#include "httplib.h"
#include "vqaprobe/core/image.h"
#include "vqaprobe/store/records.h"

namespace vqaprobe {
namespace {

using nlohmann::json;

std::optional<std::string> Param(const QueryParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<std::string> Required(const QueryParams& params,
                                     const std::string& key) {
  std::optional<std::string> v = Param(params, key);
  if (!v || v->empty()) {
    return absl::InvalidArgumentError(fmt::format("missing parameter '{}'", key));
  }
  return *v;
}

template <typename T>
absl::StatusOr<T> Number(const QueryParams& params, const std::string& key,
                         T fallback) {
  std::optional<std::string> v = Param(params, key);
  if (!v) return fallback;
  T out{};
  const char* end = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    return absl::InvalidArgumentError(
        fmt::format("parameter '{}' is not a number: '{}'", key, *v));
  }
  return out;
}

absl::StatusOr<MetricId> Metric(const QueryParams& params) {
  absl::StatusOr<std::string> name = Required(params, "metric");
  if (!name.ok()) return name.status();
  std::optional<MetricId> id = ParseMetricId(*name);
  if (!id) return absl::NotFoundError(fmt::format("unknown metric '{}'", *name));
  return *id;
}

absl::StatusOr<const DatasetResults*> Dataset(const ResultsIndex& index,
                                              const QueryParams& params) {
  absl::StatusOr<std::string> model = Required(params, "model");
  if (!model.ok()) return model.status();
  absl::StatusOr<std::string> dataset = Required(params, "dataset");
  if (!dataset.ok()) return dataset.status();
  const DatasetResults* r = index.Find(*model, *dataset);
  if (r == nullptr) {
    return absl::NotFoundError(
        fmt::format("no results for model '{}' on dataset '{}'", *model, *dataset));
  }
  return r;
}

std::filesystem::path ImageRoot(const RunHeader& header) {
  const json& config = header.config;
  if (config.contains("image_root") && config["image_root"].is_string()) {
    return config["image_root"].get<std::string>();
  }
  if (config.contains("dataset") && config["dataset"].is_string()) {
    return std::filesystem::path(config["dataset"].get<std::string>()).parent_path();
  }
  return {};
}

std::string ContentType(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

QueryParams ParamsOf(const httplib::Request& req) {
  QueryParams out;
  for (const auto& [k, v] : req.params) out.emplace(k, v);
  return out;
}

void Reply(httplib::Response& res, const json& body) {
  res.status = 200;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace),
                  "application/json");
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  res.status = HttpStatusOf(status);
  std::string code = "internal";
  if (status.code() == absl::StatusCode::kInvalidArgument) code = "bad_request";
  if (status.code() == absl::StatusCode::kNotFound) code = "not_found";
  res.set_content(
      json{{"error", code}, {"message", std::string(status.message())}}.dump(),
      "application/json");
}

}  // namespace

int HttpStatusOf(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kResourceExhausted:
      return 413;
    default:
      return 500;
  }
}

std::string ImageUrl(std::string_view dataset, std::string_view sample_id) {
  return fmt::format("/api/image?dataset={}&id={}",
                     httplib::detail::encode_query_param(std::string(dataset)),
                     httplib::detail::encode_query_param(std::string(sample_id)));
}

json ApiModels(const ResultsIndex& index) {
  json out = json::array();
  for (const std::string& model : index.Models()) {
    json datasets = json::array();
    for (const DatasetResults* d : index.DatasetsOf(model)) {
      datasets.push_back(d->dataset);
    }
    std::optional<int64_t> params = index.ParameterCount(model);
    out.push_back({{"model", model},
                   {"parameter_count", params ? json(*params) : json(nullptr)},
                   {"datasets", std::move(datasets)}});
  }
  return out;
}

json ApiOverview(const ResultsIndex& index) {
  json out = json::array();
  for (const std::string& model : index.Models()) {
    json rows = json::array();
    for (const DatasetResults* d : index.DatasetsOf(model)) {
      rows.push_back(AggregateRowToJson(d->aggregate));
    }
    std::optional<int64_t> params = index.ParameterCount(model);
    out.push_back({{"model", model},
                   {"parameter_count", params ? json(*params) : json(nullptr)},
                   {"global", AggregateRowToJson(*index.Global(model))},
                   {"datasets", std::move(rows)}});
  }
  return out;
}

absl::StatusOr<json> ApiHistogram(const ResultsIndex& index,
                                  const QueryParams& params) {
  HistogramSpec spec;
  absl::StatusOr<const DatasetResults*> d = Dataset(index, params);
  if (!d.ok()) return d.status();
  absl::StatusOr<MetricId> metric = Metric(params);
  if (!metric.ok()) return metric.status();
  absl::StatusOr<int> bins = Number<int>(params, "bins", kDefaultHistogramBins);
  if (!bins.ok()) return bins.status();
  spec.model = (*d)->model;
  spec.dataset = (*d)->dataset;
  spec.metric = *metric;
  spec.bins = *bins;
  absl::StatusOr<Histogram> h = index.BuildHistogram(spec);
  if (!h.ok()) return h.status();
  json bin_list = json::array();
  for (int k = 0; k < spec.bins; ++k) {
    bin_list.push_back({{"lo", HistogramEdge(k, spec.bins)},
                        {"hi", HistogramEdge(k + 1, spec.bins)},
                        {"count", h->counts[k]},
                        {"percent", h->percent[k]}});
  }
  return json{{"model", spec.model},
              {"dataset", spec.dataset},
              {"metric", std::string(MetricIdName(spec.metric))},
              {"bins", std::move(bin_list)},
              {"evaluated", h->evaluated},
              {"null_count", h->null_count}};
}

absl::StatusOr<json> ApiFilter(const ResultsIndex& index, const QueryParams& params) {
  absl::StatusOr<const DatasetResults*> d = Dataset(index, params);
  if (!d.ok()) return d.status();
  absl::StatusOr<MetricId> metric = Metric(params);
  if (!metric.ok()) return metric.status();
  FilterQuery q;
  q.model = (*d)->model;
  q.dataset = (*d)->dataset;
  q.metric = *metric;
  absl::StatusOr<double> min = Number<double>(params, "min", 0.0);
  absl::StatusOr<double> max = Number<double>(params, "max", 100.0);
  absl::StatusOr<int64_t> offset = Number<int64_t>(params, "offset", 0);
  absl::StatusOr<int64_t> limit = Number<int64_t>(params, "limit", 50);
  for (const absl::Status& s :
       {min.status(), max.status(), offset.status(), limit.status()}) {
    if (!s.ok()) return s;
  }
  q.min = *min;
  q.max = *max;
  q.offset = *offset;
  q.limit = *limit;
  absl::StatusOr<FilterPage> page = index.Filter(q);
  if (!page.ok()) return page.status();
  json samples = json::array();
  for (const FilterHit& h : page->hits) {
    samples.push_back({{"sample_id", h.sample_id},
                       {"value", h.value},
                       {"question", h.question},
                       {"thumbnail", ImageUrl(q.dataset, h.sample_id)}});
  }
  return json{{"model", q.model},          {"dataset", q.dataset},
              {"metric", std::string(MetricIdName(q.metric))},
              {"min", q.min},              {"max", q.max},
              {"offset", q.offset},        {"limit", q.limit},
              {"total", page->total},      {"samples", std::move(samples)}};
}

absl::StatusOr<json> ApiSample(const ResultsIndex& index, const QueryParams& params) {
  absl::StatusOr<const DatasetResults*> d = Dataset(index, params);
  if (!d.ok()) return d.status();
  absl::StatusOr<std::string> id = Required(params, "id");
  if (!id.ok()) return id.status();
  const SampleMetrics* m = (*d)->Find(*id);
  if (m == nullptr) return absl::NotFoundError(fmt::format("unknown sample '{}'", *id));

  json top3 = json::array();
  for (size_t i = 0; i < m->original.topk.size() && i < 3; ++i) {
    top3.push_back({{"answer", m->original.topk[i].answer},
                    {"prob", m->original.topk[i].prob}});
  }
  json truth = json::array();
  for (const AnswerScore& a : m->answers) {
    truth.push_back({{"answer", a.answer}, {"score", a.score}});
  }
  const json record = SampleMetricsToJson(*m);
  json cards = json::array();
  for (MetricId id : kTrialMetrics) {
    const MetricOutcome& o = m->outcome(id);
    const std::string name(MetricIdName(id));
    json card = record["metrics"][name];
    card["metric"] = name;
    card["status"] = o.result ? "ok" : (o.errored ? "error" : "not_applicable");
    if (!card.contains("trials")) card["trials"] = json::array();
    cards.push_back(std::move(card));
  }
  return json{{"model", (*d)->model},
              {"dataset", (*d)->dataset},
              {"sample_id", m->sample_id},
              {"question", m->question},
              {"image", ImageUrl((*d)->dataset, m->sample_id)},
              {"ground_truth", std::move(truth)},
              {"top3", std::move(top3)},
              {"accuracy", m->accuracy ? json(100.0 * *m->accuracy) : json(nullptr)},
              {"error", m->error ? json(*m->error) : json(nullptr)},
              {"cards", std::move(cards)},
              {"record", record}};
}

absl::StatusOr<std::filesystem::path> ApiImagePath(const ResultsIndex& index,
                                                   const QueryParams& params) {
  absl::StatusOr<std::string> dataset = Required(params, "dataset");
  if (!dataset.ok()) return dataset.status();
  absl::StatusOr<std::string> id = Required(params, "id");
  if (!id.ok()) return id.status();
  for (const std::string& model : index.Models()) {
    const DatasetResults* d = index.Find(model, *dataset);
    if (d == nullptr) continue;
    const SampleMetrics* m = d->Find(*id);
    if (m == nullptr) continue;
    const std::filesystem::path root = ImageRoot(d->header).lexically_normal();
    const std::filesystem::path path = (root / m->image_ref).lexically_normal();
    const std::filesystem::path rel = path.lexically_relative(root);
    if (root.empty() || m->image_ref.empty() || rel.empty() ||
        *rel.begin() == "..") {
      return absl::NotFoundError(
          fmt::format("image of '{}' is outside the image root", *id));
    }
    return path;
  }
  return absl::NotFoundError(
      fmt::format("unknown sample '{}' in dataset '{}'", *id, *dataset));
}

ApiServer::ApiServer(ApiServerOptions options)
    : options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()),
      index_(std::make_shared<ResultsIndex>()) {
  Register();
}

ApiServer::~ApiServer() { Stop(); }

absl::Status ApiServer::Reload() {
  if (!std::filesystem::is_directory(options_.results_dir)) {
    return absl::NotFoundError(fmt::format(
        "results directory {} does not exist", options_.results_dir.string()));
  }
  absl::StatusOr<ResultsIndex> built =
      ResultsIndex::Build(options_.results_dir, /*allow_empty=*/true);
  if (!built.ok()) return built.status();
  auto fresh = std::make_shared<const ResultsIndex>(*std::move(built));
  std::lock_guard lock(mu_);
  index_ = std::move(fresh);
  return absl::OkStatus();
}

std::shared_ptr<const ResultsIndex> ApiServer::index() const {
  std::lock_guard lock(mu_);
  return index_;
}

void ApiServer::Register() {
  using Handler =
      std::function<absl::StatusOr<json>(const ResultsIndex&, const QueryParams&)>;
  auto route = [this](const std::string& path, Handler handler) {
    server_->Get(path, [this, handler](const httplib::Request& req,
                                       httplib::Response& res) {
      absl::StatusOr<json> body = handler(*index(), ParamsOf(req));
      if (!body.ok()) return ReplyError(res, body.status());
      Reply(res, *body);
    });
  };
  route("/api/models", [](const ResultsIndex& i, const QueryParams&) {
    return absl::StatusOr<json>(ApiModels(i));
  });
  route("/api/overview", [](const ResultsIndex& i, const QueryParams&) {
    return absl::StatusOr<json>(ApiOverview(i));
  });
  route("/api/histogram", ApiHistogram);
  route("/api/filter", ApiFilter);
  route("/api/sample", ApiSample);
  route("/api/problems", [](const ResultsIndex& i, const QueryParams&) {
    json out = json::array();
    for (const IndexProblem& p : i.problems()) {
      out.push_back({{"file", p.file.string()}, {"error", p.error}});
    }
    return absl::StatusOr<json>(out);
  });

  server_->Get("/api/image", [this](const httplib::Request& req,
                                    httplib::Response& res) {
    absl::StatusOr<std::filesystem::path> path = ApiImagePath(*index(), ParamsOf(req));
    if (!path.ok()) return ReplyError(res, path.status());
    std::error_code ec;
    const uintmax_t size = std::filesystem::file_size(*path, ec);
    if (ec) return ReplyError(res, absl::NotFoundError("image file is missing"));
    if (size > options_.max_image_bytes) {
      return ReplyError(res, absl::ResourceExhaustedError(fmt::format(
                                 "image is {} bytes; the limit is {}", size,
                                 options_.max_image_bytes)));
    }
    absl::StatusOr<std::string> bytes = ReadFileBytes(*path);
    if (!bytes.ok()) return ReplyError(res, bytes.status());
    res.set_content(*std::move(bytes), ContentType(*path));
  });

  server_->Post("/api/reload", [this](const httplib::Request&,
                                      httplib::Response& res) {
    if (absl::Status s = Reload(); !s.ok()) return ReplyError(res, s);
    Reply(res, {{"datasets", index()->size()},
                {"problems", index()->problems().size()}});
  });

  if (options_.static_dir) {
    server_->set_mount_point("/", options_.static_dir->string());
  }
  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                    std::exception_ptr ep) {
    std::string what = "unhandled exception";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    ReplyError(res, absl::InternalError(what));
  });
}

absl::StatusOr<int> ApiServer::Start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    return absl::UnavailableError(fmt::format("cannot bind {}:{}", host, port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ApiServer::Stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string ApiServer::url() const { return fmt::format("http://{}:{}", host_, port_); }

}  // namespace vqaprobe
