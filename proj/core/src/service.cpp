#include "guardrail/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <thread>

#include <spdlog/spdlog.h>

#include "guardrail/chart.hpp"
#include "guardrail/dataset_json.hpp"
#include "guardrail/error.hpp"
#include "guardrail/evaluation.hpp"
#include "guardrail/strategies.hpp"

namespace guardrail {

namespace fs = std::filesystem;

std::string_view engine_version() { return GUARDRAIL_VERSION; }

ServiceConfig service_config_from_json(const Json& j) {
  ServiceConfig c;
  try {
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("bind")) c.bind = j.at("bind").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("static_map_path")) c.static_map_path = j.at("static_map_path").get<std::string>();
    if (j.contains("alias_paths")) c.alias_paths = j.at("alias_paths").get<std::vector<std::string>>();
    if (j.contains("precompute_dir")) c.precompute_dir = j.at("precompute_dir").get<std::string>();
    if (j.contains("app_dir")) c.app_dir = j.at("app_dir").get<std::string>();
    if (j.contains("provider")) {
      auto p = provider_config_from_json(j.at("provider"));
      if (p.mode == ProviderMode::external) c.external = std::move(p);
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed service config: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) fail(ErrorKind::invalid_input, "port out of range");
  return c;
}

HttpRequest HttpRequest::from_target(std::string_view target) {
  HttpRequest r;
  const auto q = target.find('?');
  r.path = httplib::detail::decode_url(std::string(target.substr(0, q)), false);
  if (q == std::string_view::npos) return r;
  httplib::Params params;
  httplib::detail::parse_query_text(std::string(target.substr(q + 1)), params);
  for (const auto& [k, v] : params) r.query.emplace(k, v);
  return r;
}

// --- snapshot loading -------------------------------------------------------

namespace {

bool looks_like_dataset(const Json& j) {
  return j.is_object() && j.contains("dataset_id") && j.contains("timesteps") &&
         j.contains("items");
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::shared_ptr<const ServiceSnapshot> load_snapshot(const ServiceConfig& config) {
  auto snap = std::make_shared<ServiceSnapshot>();
  if (!fs::is_directory(config.data_dir)) {
    fail(ErrorKind::io, "data directory '" + config.data_dir.string() + "' does not exist");
  }

  for (const auto& dir : {config.data_dir, config.data_dir / "datasets"}) {
    for (const auto& path : json_files(dir)) {
      Json j;
      try {
        j = read_json_file(path.string());
      } catch (const Error&) {
        continue;  // not every json file in the data dir is a dataset
      }
      if (!looks_like_dataset(j)) continue;
      auto ds = dataset_from_json(j);
      const auto id = ds.id();
      if (snap->datasets.count(id)) {
        fail(ErrorKind::invalid_input, "dataset id '" + id + "' loaded twice (" + path.string() + ")");
      }
      auto digest = dataset_digest(ds);
      snap->datasets.emplace(id, std::make_shared<const LoadedDataset>(
                                     LoadedDataset{std::move(ds), std::move(digest), path.string()}));
    }
  }

  const auto pre_dir = config.precompute_dir.value_or(config.data_dir / "precomputed");
  snap->index = PrecomputeIndex::load(pre_dir / "index.json");
  for (const auto& [ds_id, focals] : snap->index.table()) {
    for (const auto& [focal, kinds] : focals) {
      for (const auto& [kind, entry] : kinds) {
        const auto path = pre_dir / entry.key;
        if (!fs::is_regular_file(path)) {
          spdlog::warn("precomputed set {} listed in index but missing", entry.key);
          continue;
        }
        auto body = read_file(path.string());
        if (sha256_hex(body) != entry.digest) {
          spdlog::warn("precomputed set {} does not match its digest; ignoring", entry.key);
          continue;
        }
        snap->precomputed_bodies.emplace(entry.key, std::move(body));
      }
    }
  }

  if (config.external) {
    std::vector<std::string> alias_paths = config.external->alias_paths;
    if (alias_paths.empty()) alias_paths = config.alias_paths;
    if (alias_paths.empty()) {
      for (const auto& p : json_files(config.data_dir / "aliases")) alias_paths.push_back(p.string());
    }
    snap->provider = std::make_shared<const ExternalPeerProvider>(*config.external,
                                                                  AliasTable::load(alias_paths));
  } else {
    const auto map_path =
        config.static_map_path.value_or(config.data_dir / "peers" / "static_map.json");
    if (fs::is_regular_file(map_path)) {
      snap->provider =
          std::make_shared<const StaticPeerProvider>(load_static_map(map_path.string()));
    } else if (config.static_map_path) {
      fail(ErrorKind::io, "static peer map '" + map_path.string() + "' does not exist");
    }
  }
  spdlog::info("loaded {} datasets, {} precomputed sets", snap->datasets.size(),
               snap->precomputed_bodies.size());
  return snap;
}

// --- request handling -------------------------------------------------------

namespace {

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void http_fail(int status, std::string message) {
  throw HttpError{status, std::move(message)};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

const std::string& required(const HttpRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end() || it->second.empty()) http_fail(400, "missing query parameter '" + key + "'");
  return it->second;
}

std::optional<std::uint64_t> optional_uint(const HttpRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    http_fail(400, "query parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

StrategyKind strategy_param(const HttpRequest& r) {
  const auto& name = required(r, "strategy");
  auto kind = parse_strategy_kind(name);
  if (!kind) {
    std::string valid;
    for (auto k : all_strategy_kinds()) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
    http_fail(404, "unknown strategy '" + name + "' (valid: " + valid + ")");
  }
  return *kind;
}

const ItemSeries& item_or_404(const TimeSeriesDataset& ds, const std::string& id) {
  auto idx = ds.index_of(id);
  if (!idx) http_fail(404, "unknown item '" + id + "' in dataset '" + ds.id() + "'");
  return ds.items()[*idx];
}

HttpResponse json_response(const Json& j) {
  HttpResponse r;
  r.body = canonical_dump(j);
  return r;
}

class Router {
 public:
  Router(const ServiceSnapshot& snap, const HttpRequest& req) : snap_(snap), req_(req) {}

  HttpResponse route() {
    const auto parts = split_path(req_.path);
    if (parts.size() == 1 && parts[0] == "datasets") return list_datasets();
    if (parts.size() == 3 && parts[0] == "datasets") {
      const auto& entry = dataset(parts[1]);
      HttpResponse r;
      if (parts[2] == "items") {
        r = items(entry.dataset);
      } else if (parts[2] == "series") {
        r = series(entry.dataset);
      } else if (parts[2] == "guardrails") {
        r = guardrails(entry.dataset);
      } else if (parts[2] == "rank") {
        r = rank(entry.dataset);
      } else if (parts[2] == "chart") {
        r = chart(entry.dataset);
      } else {
        http_fail(404, "unknown endpoint '" + req_.path + "'");
      }
      r.headers["X-Dataset-Digest"] = entry.digest;
      return r;
    }
    http_fail(404, "unknown endpoint '" + req_.path + "'");
  }

 private:
  const LoadedDataset& dataset(const std::string& id) {
    auto it = snap_.datasets.find(id);
    if (it == snap_.datasets.end()) http_fail(404, "unknown dataset '" + id + "'");
    return *it->second;
  }

  HttpResponse list_datasets() {
    Json list = Json::array();
    for (const auto& [id, entry] : snap_.datasets) {
      const auto& ds = entry->dataset;
      Json log = Json::array();
      for (const auto& t : ds.transform_log()) log.push_back(to_json(t));
      list.push_back({{"id", id},
                      {"direction", to_string(ds.direction())},
                      {"item_count", ds.item_count()},
                      {"timestep_count", ds.timestep_count()},
                      {"window", {{"start", ds.timesteps().front().iso()},
                                  {"end", ds.timesteps().back().iso()}}},
                      {"transform_log", std::move(log)},
                      {"digest", entry->digest}});
    }
    return json_response({{"datasets", std::move(list)}});
  }

  HttpResponse items(const TimeSeriesDataset& ds) {
    Json list = Json::array();
    for (const auto& item : ds.items()) list.push_back({{"id", item.id}, {"name", item.display_name}});
    return json_response({{"dataset_id", ds.id()}, {"items", std::move(list)}});
  }

  HttpResponse series(const TimeSeriesDataset& ds) {
    const auto ids = split_list(required(req_, "items"));
    if (ids.empty()) http_fail(400, "query parameter 'items' lists no items");
    Json list = Json::array();
    for (const auto& id : ids) {
      const auto& item = item_or_404(ds, id);
      Json values = Json::array();
      for (std::size_t t = 0; t < item.values.size(); ++t) {
        values.push_back(item.is_missing(t) ? Json(nullptr) : Json(item.values[t]));
      }
      list.push_back({{"id", item.id}, {"name", item.display_name}, {"values", std::move(values)}});
    }
    Json x = Json::array();
    for (const auto& d : ds.timesteps()) x.push_back(d.iso());
    return json_response({{"dataset_id", ds.id()}, {"timesteps", std::move(x)}, {"series", std::move(list)}});
  }

  StrategySpec spec_from_query(StrategyKind kind) {
    StrategySpec spec = default_spec(kind);
    if (auto n = optional_uint(req_, "n")) {
      if (*n == 0) http_fail(400, "query parameter 'n' must be positive");
      spec.n = static_cast<std::size_t>(*n);
    }
    spec.seed = optional_uint(req_, "seed");
    return spec;
  }

  // Precomputed bodies are served only for default requests, which is what
  // the precompute step stores.
  std::optional<std::string> precomputed(const TimeSeriesDataset& ds, const std::string& focal,
                                         StrategyKind kind) {
    if (req_.query.count("n") || req_.query.count("seed")) return std::nullopt;
    const auto* entry = snap_.index.find(ds.id(), focal, kind);
    if (!entry) return std::nullopt;
    auto it = snap_.precomputed_bodies.find(entry->key);
    if (it == snap_.precomputed_bodies.end()) return std::nullopt;
    return it->second;
  }

  std::string guardrail_body(const TimeSeriesDataset& ds, const std::string& focal,
                             StrategyKind kind) {
    item_or_404(ds, focal);
    const auto spec = spec_from_query(kind);
    if (auto body = precomputed(ds, focal, kind)) return *body;
    if (kind == StrategyKind::semantic && !snap_.provider) {
      http_fail(404, "no precomputed semantic guardrails for '" + focal +
                         "' and no peer provider configured");
    }
    return guardrail_json(ds, focal, spec, snap_.provider.get());
  }

  HttpResponse guardrails(const TimeSeriesDataset& ds) {
    const auto& focal = required(req_, "focal");
    const auto kind = strategy_param(req_);
    HttpResponse r;
    r.body = guardrail_body(ds, focal, kind);
    return r;
  }

  HttpResponse rank(const TimeSeriesDataset& ds) {
    const auto& id = required(req_, "item");
    item_or_404(ds, id);
    return json_response({{"dataset_id", ds.id()},
                          {"item_id", id},
                          {"true_rank", percentile_rank(ds, id)},
                          {"performance_score", performance_score(ds, id)}});
  }

  HttpResponse chart(const TimeSeriesDataset& ds) {
    const auto& focal = required(req_, "focal");
    item_or_404(ds, focal);
    auto strategy = req_.query.count("strategy") ? req_.query.at("strategy") : std::string("none");
    auto format = req_.query.count("format") ? req_.query.at("format") : std::string("json");

    if (format == "svg") {
      // Rendering needs the set itself, so it is computed rather than read
      // from the precomputed JSON; the result is identical by construction.
      std::optional<GuardrailSet> set;
      if (strategy != "none") {
        const auto kind = strategy_param(req_);
        if (kind == StrategyKind::semantic && !snap_.provider) {
          http_fail(404, "semantic chart for '" + focal + "' needs a peer provider");
        }
        set = compute_guardrails(ds, focal, spec_from_query(kind), snap_.provider.get());
      }
      HttpResponse r;
      r.content_type = "image/svg+xml";
      r.body = render_svg(make_chart_spec(ds, focal, std::move(set)));
      return r;
    }

    std::optional<Json> guard;
    if (strategy != "none") guard = Json::parse(guardrail_body(ds, focal, strategy_param(req_)));
    const auto spec = make_chart_spec(ds, focal, std::nullopt);
    if (format != "json") http_fail(400, "format must be json or svg");
    Json j = to_json(spec);
    if (guard) j["guardrails"] = std::move(*guard);
    return json_response(j);
  }

  const ServiceSnapshot& snap_;
  const HttpRequest& req_;
};

HttpResponse error_response(int status, const std::string& message) {
  const char* reason = status == 400 ? "bad_request"
                       : status == 404 ? "not_found"
                       : status == 502 ? "provider_error"
                                       : "internal_error";
  HttpResponse r;
  r.status = status;
  r.body = canonical_dump({{"error", {{"status", status}, {"code", reason}, {"message", message}}}});
  return r;
}

}  // namespace

// --- Service ------------------------------------------------------------------

struct Service::Server {
  httplib::Server http;
  std::atomic<int> port{-1};
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)), server_(std::make_unique<Server>()) {
  reload();
}

Service::~Service() { stop(); }

void Service::reload() {
  auto next = load_snapshot(config_);
  std::lock_guard lock(mutex_);
  snapshot_ = std::move(next);
}

std::shared_ptr<const ServiceSnapshot> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

HttpResponse Service::handle(const HttpRequest& request) const {
  const auto snap = snapshot();
  HttpResponse r;
  try {
    r = Router(*snap, request).route();
  } catch (const HttpError& e) {
    r = error_response(e.status, e.message);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::not_found:
        r = error_response(404, e.what());
        break;
      case ErrorKind::invalid_argument:
      case ErrorKind::invalid_input:
        r = error_response(400, e.what());
        break;
      case ErrorKind::provider:
        spdlog::error("provider failure on {}: {}", request.path, e.what());
        r = error_response(502, "peer provider unavailable");
        break;
      default:
        spdlog::error("request {} failed: {}", request.path, e.what());
        r = error_response(500, "internal error");
    }
  } catch (const std::exception& e) {
    spdlog::error("request {} failed: {}", request.path, e.what());
    r = error_response(500, "internal error");
  }
  r.headers["X-Engine-Version"] = std::string(engine_version());
  r.headers["ETag"] = "\"" + sha256_hex(r.body).substr(0, 32) + "\"";
  return r;
}

void Service::listen() {
  auto& http = server_->http;
  if (config_.app_dir) {
    if (!http.set_mount_point("/app", config_.app_dir->string())) {
      fail(ErrorKind::io, "app directory '" + config_.app_dir->string() + "' does not exist");
    }
  }
  http.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    const auto out = handle(request);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, out.content_type);
  });
  const int port = config_.port == 0 ? http.bind_to_any_port(config_.bind)
                                     : (http.bind_to_port(config_.bind, config_.port) ? config_.port : -1);
  if (port < 0) {
    fail(ErrorKind::io, "cannot bind " + config_.bind + ":" + std::to_string(config_.port));
  }
  server_->port = port;
  spdlog::info("serving {} datasets on http://{}:{}", snapshot()->datasets.size(), config_.bind, port);
  http.listen_after_bind();
}

void Service::stop() {
  if (server_) server_->http.stop();
}

int Service::bound_port() const { return server_ ? server_->port.load() : -1; }

bool Service::wait_until_ready(int timeout_ms) const {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    if (server_ && server_->port >= 0 && server_->http.is_running()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return false;
}

}  // namespace guardrail
