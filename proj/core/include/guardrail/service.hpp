#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardrail/canonical.hpp"
#include "guardrail/dataset.hpp"
#include "guardrail/peers.hpp"
#include "guardrail/precompute.hpp"

namespace guardrail {

std::string_view engine_version();

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string bind = "127.0.0.1";
  int port = 8080;
  // Defaults resolve inside data_dir: peers/static_map.json, aliases/*.json,
  // precomputed/index.json.
  std::optional<std::filesystem::path> static_map_path;
  std::vector<std::string> alias_paths;
  std::optional<std::filesystem::path> precompute_dir;
  // The semantic strategy only calls an external endpoint when this is set
  // with mode = external.
  std::optional<PeerProviderConfig> external;
  std::optional<std::filesystem::path> app_dir;  // static UI bundle under /app
};

ServiceConfig service_config_from_json(const Json& j);

struct HttpRequest {
  std::string path;
  std::map<std::string, std::string> query;

  // "/datasets/covid/rank?item=BLR" with percent-decoding.
  static HttpRequest from_target(std::string_view target);
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct LoadedDataset {
  TimeSeriesDataset dataset;
  std::string digest;
  std::string source;
};

// Immutable view shared by in-flight requests; reload() builds a new one and
// swaps the pointer.
struct ServiceSnapshot {
  std::map<std::string, std::shared_ptr<const LoadedDataset>> datasets;
  PrecomputeIndex index;
  std::map<std::string, std::string> precomputed_bodies;  // storage key -> body
  std::shared_ptr<const PeerProvider> provider;
};

class Service {
 public:
  explicit Service(ServiceConfig config);  // loads the first snapshot
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Pure request handler; never touches the filesystem.
  HttpResponse handle(const HttpRequest& request) const;

  void reload();
  std::shared_ptr<const ServiceSnapshot> snapshot() const;

  // Blocks serving GET requests until stop() is called from another thread.
  // Throws Error(io) when the address cannot be bound.
  void listen();
  void stop();
  // Port actually bound (useful with port 0); valid after listen() started.
  int bound_port() const;
  bool wait_until_ready(int timeout_ms) const;

  const ServiceConfig& config() const { return config_; }

 private:
  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceSnapshot> snapshot_;
  struct Server;
  std::unique_ptr<Server> server_;
};

std::shared_ptr<const ServiceSnapshot> load_snapshot(const ServiceConfig& config);

}  // namespace guardrail
