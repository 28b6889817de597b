#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "guardrail/chart.hpp"
#include "guardrail/dataset_json.hpp"
#include "guardrail/error.hpp"
#include "guardrail/evaluation.hpp"
#include "guardrail/ingest.hpp"
#include "guardrail/precompute.hpp"
#include "guardrail/service.hpp"
#include "guardrail/strategies.hpp"
#include "guardrail/validate.hpp"
#include "pipeline.hpp"

namespace fs = std::filesystem;
using namespace guardrail;

namespace {

// Exit 2 covers everything the caller can fix by changing the command line:
// missing inputs, unknown names, bad parameters.
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::string> config_path;
  std::string log_level = "info";
  std::optional<std::string> data_dir;
  Json config = Json::object();
};

fs::path resolve_data_dir(const Globals& g) {
  if (g.data_dir) return *g.data_dir;
  if (const char* env = std::getenv("GUARDRAIL_DATA_DIR"); env && *env) return env;
  if (g.config.contains("data_dir")) return g.config.at("data_dir").get<std::string>();
  return "data";
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw UsageError(what + " '" + p.string() + "' does not exist");
}

// Accepts a path or a dataset id stored as <data_dir>/datasets/<id>.json.
TimeSeriesDataset open_dataset(const Globals& g, const std::string& ref) {
  fs::path p = ref;
  if (!fs::exists(p)) {
    const auto by_id = resolve_data_dir(g) / "datasets" / (ref + ".json");
    if (fs::exists(by_id)) p = by_id;
  }
  require_file(p, "dataset");
  return load_dataset(p.string());
}

StrategyKind strategy_or_usage(const std::string& name) {
  if (auto k = parse_strategy_kind(name)) return *k;
  std::string valid;
  for (auto k : all_strategy_kinds()) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
  throw UsageError("unknown strategy '" + name + "' (valid: " + valid + ")");
}

void focal_or_usage(const TimeSeriesDataset& ds, const std::string& focal) {
  if (!ds.contains(focal)) {
    throw UsageError("unknown focal item '" + focal + "' in dataset '" + ds.id() + "'");
  }
}

void write_output(const std::optional<std::string>& path, const std::string& body) {
  if (!path || *path == "-") {
    std::cout << body;
    if (body.empty() || body.back() != '\n') std::cout << '\n';
    return;
  }
  if (auto parent = fs::path(*path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + *path + "'");
  out << body;
}

struct ProviderOptions {
  std::optional<std::string> static_map;
  std::optional<std::string> provider_config;
  std::optional<std::string> transcript;
};

void add_provider_options(CLI::App* cmd, ProviderOptions& o) {
  cmd->add_option("--static-map", o.static_map, "Static peer map JSON (default: <data>/peers/static_map.json)");
  cmd->add_option("--provider-config", o.provider_config, "Peer provider config JSON (enables external mode)");
  cmd->add_option("--transcript", o.transcript, "Replay a recorded provider transcript");
}

std::unique_ptr<PeerProvider> make_provider(const Globals& g, const ProviderOptions& o) {
  const auto data = resolve_data_dir(g);
  auto aliases = [&](const std::vector<std::string>& explicit_paths) {
    std::vector<std::string> paths = explicit_paths;
    if (paths.empty() && fs::is_directory(data / "aliases")) {
      for (const auto& e : fs::directory_iterator(data / "aliases")) {
        if (e.path().extension() == ".json") paths.push_back(e.path().string());
      }
      std::sort(paths.begin(), paths.end());
    }
    return AliasTable::load(paths);
  };
  if (o.transcript) {
    require_file(*o.transcript, "transcript");
    return std::make_unique<TranscriptPeerProvider>(
        transcript_from_json(read_json_file(*o.transcript)), aliases({}));
  }
  Json provider_json = g.config.value("provider", Json::object());
  if (o.provider_config) {
    require_file(*o.provider_config, "provider config");
    provider_json = read_json_file(*o.provider_config);
  }
  if (!provider_json.empty()) {
    auto cfg = provider_config_from_json(provider_json);
    if (cfg.mode == ProviderMode::external) {
      cfg.check();
      return std::make_unique<ExternalPeerProvider>(cfg, aliases(cfg.alias_paths));
    }
    if (cfg.static_map_path && !o.static_map) {
      require_file(*cfg.static_map_path, "static peer map");
      return std::make_unique<StaticPeerProvider>(load_static_map(*cfg.static_map_path));
    }
  }
  const fs::path map = o.static_map ? fs::path(*o.static_map) : data / "peers" / "static_map.json";
  if (!fs::exists(map)) {
    if (o.static_map) require_file(map, "static peer map");
    return nullptr;
  }
  return std::make_unique<StaticPeerProvider>(load_static_map(map.string()));
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string output;
  std::optional<std::string> report;
  std::string layout = "long";
  std::string dataset_id;
  std::string direction = "higher_is_better";
  std::string transforms;
  double max_missing = 0.05;
  LongSchema schema;
  std::string name_col, population_col;
};

int run_ingest(const IngestArgs& a) {
  require_file(a.input, "input file");
  DatasetMeta meta;
  meta.dataset_id = a.dataset_id.empty() ? fs::path(a.output).stem().string() : a.dataset_id;
  meta.direction = parse_direction(a.direction);
  const auto steps = cli::parse_pipeline(a.transforms);

  std::ifstream in(a.input, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read '" + a.input + "'");
  TimeSeriesDataset raw = [&] {
    if (a.layout == "wide") return ingest_wide_csv(in, WideSchema{a.schema.date}, meta);
    if (a.layout != "long") throw UsageError("--layout must be long or wide");
    LongSchema schema = a.schema;
    if (!a.name_col.empty()) schema.display_name = a.name_col;
    if (!a.population_col.empty()) schema.population = a.population_col;
    return ingest_long_csv(in, schema, meta);
  }();

  ValidationPolicy policy;
  policy.max_missing_fraction = a.max_missing;
  const auto result = cli::run_pipeline(raw, steps, policy);
  save_dataset(result.dataset, a.output);

  Json report = to_json(result.report);
  report["clipped_items"] = result.clipped_items;
  const auto report_path =
      a.report.value_or((fs::path(a.output).parent_path() / fs::path(a.output).stem()).string() +
                        ".report.json");
  write_output(report_path, canonical_dump(report) + "\n");
  spdlog::info("{}: {} items x {} timesteps, {} removed, {} cells filled -> {}",
               result.dataset.id(), result.dataset.item_count(), result.dataset.timestep_count(),
               result.report.removed.size(), result.report.filled.size(), a.output);
  return 0;
}

// --- precompute ---------------------------------------------------------------

struct PrecomputeArgs {
  std::string dataset;
  std::vector<std::string> strategies;
  std::vector<std::string> focals;
  bool all = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  ProviderOptions provider;
};

int run_precompute(const Globals& g, const PrecomputeArgs& a) {
  const auto ds = open_dataset(g, a.dataset);
  PrecomputeRequest req;
  if (a.strategies.empty()) {
    req.strategies = all_strategy_kinds();
  } else {
    for (const auto& s : a.strategies) req.strategies.push_back(strategy_or_usage(s));
  }
  if (a.all == !a.focals.empty()) throw UsageError("pass either --focal or --all");
  for (const auto& f : a.focals) focal_or_usage(ds, f);
  req.focals = a.focals;
  req.all_items = a.all;
  req.seed = a.seed;
  req.out_dir = a.out ? fs::path(*a.out) : resolve_data_dir(g) / "precomputed";
  auto provider = make_provider(g, a.provider);
  req.provider = provider.get();

  const auto stats = precompute(ds, req);
  std::cout << canonical_dump({{"dataset_id", ds.id()},
                               {"written", stats.written},
                               {"unchanged", stats.unchanged},
                               {"skipped", stats.skipped},
                               {"index_written", stats.index_written},
                               {"out_dir", req.out_dir.string()}})
            << "\n";
  return 0;
}

// --- chart --------------------------------------------------------------------

struct ChartArgs {
  std::string dataset;
  std::string focal;
  std::string strategy = "none";
  std::string format = "json";
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> caption;
  std::optional<std::string> out;
  ProviderOptions provider;
};

int run_chart(const Globals& g, const ChartArgs& a) {
  const auto ds = open_dataset(g, a.dataset);
  focal_or_usage(ds, a.focal);
  if (a.format != "json" && a.format != "svg") throw UsageError("--format must be json or svg");
  std::optional<GuardrailSet> set;
  if (a.strategy != "none") {
    auto spec = default_spec(strategy_or_usage(a.strategy));
    if (a.n) spec.n = *a.n;
    spec.seed = a.seed;
    auto provider = make_provider(g, a.provider);
    set = compute_guardrails(ds, a.focal, spec, provider.get());
  }
  const auto chart = make_chart_spec(ds, a.focal, std::move(set), a.caption);
  write_output(a.out, a.format == "svg" ? render_svg(chart) : canonical_dump(to_json(chart)));
  return 0;
}

// --- focal-select ---------------------------------------------------------------

struct FocalArgs {
  std::string dataset;
  std::optional<std::string> criteria;
  std::optional<double> target;
  std::optional<std::size_t> count;
  std::optional<double> smoothness_max;
  std::optional<double> floor_min;
  std::optional<std::string> out;
};

int run_focal_select(const Globals& g, const FocalArgs& a) {
  const auto ds = open_dataset(g, a.dataset);
  FocalCriteria c;
  if (a.criteria) {
    require_file(*a.criteria, "criteria file");
    c = focal_criteria_from_json(read_json_file(*a.criteria));
  } else if (!a.target) {
    throw UsageError("pass --criteria or --target");
  }
  if (a.target) c.target_percentile = *a.target;
  if (a.count) c.count = *a.count;
  if (a.smoothness_max) c.smoothness_max = *a.smoothness_max;
  if (a.floor_min) c.floor_min = *a.floor_min;
  c.check();

  Json candidates = Json::array();
  for (const auto& fc : focal_candidates(ds, c)) {
    candidates.push_back({{"item_id", fc.item_id},
                          {"rank", fc.rank},
                          {"smoothness", fc.smoothness},
                          {"distance", fc.distance}});
  }
  const auto selected = select_focal_items(ds, c);
  write_output(a.out, canonical_dump({{"dataset_id", ds.id()},
                                      {"criteria", to_json(c)},
                                      {"selected", selected},
                                      {"candidates", std::move(candidates)}}));
  return 0;
}

// --- serve ----------------------------------------------------------------------

struct ServeArgs {
  std::optional<std::string> bind;
  std::optional<int> port;
  std::optional<std::string> app_dir;
  std::optional<std::string> static_map;
  std::optional<std::string> precompute_dir;
};

Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int run_serve(const Globals& g, const ServeArgs& a) {
  ServiceConfig cfg = service_config_from_json(g.config);
  cfg.data_dir = resolve_data_dir(g);
  if (a.bind) cfg.bind = *a.bind;
  if (a.port) cfg.port = *a.port;
  if (a.app_dir) cfg.app_dir = *a.app_dir;
  if (a.static_map) {
    require_file(*a.static_map, "static peer map");
    cfg.static_map_path = *a.static_map;
  }
  if (a.precompute_dir) cfg.precompute_dir = *a.precompute_dir;
  if (!fs::is_directory(cfg.data_dir)) {
    throw UsageError("data directory '" + cfg.data_dir.string() + "' does not exist");
  }
  Service service(cfg);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guardrail engine: ingest time series, compute contextual guardrails, serve charts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(engine_version()));

  Globals g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  app.add_option("--data-dir", g.data_dir, "Data directory (overrides GUARDRAIL_DATA_DIR)");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "CSV to validated dataset JSON");
  ingest_cmd->add_option("--in", ingest.input, "Input CSV")->required();
  ingest_cmd->add_option("--out", ingest.output, "Output dataset JSON")->required();
  ingest_cmd->add_option("--report", ingest.report, "Validation report path (default: next to --out)");
  ingest_cmd->add_option("--layout", ingest.layout, "long or wide");
  ingest_cmd->add_option("--dataset-id", ingest.dataset_id, "Dataset id (default: output file stem)");
  ingest_cmd->add_option("--direction", ingest.direction, "higher_is_better or lower_is_better");
  ingest_cmd->add_option("--transform", ingest.transforms,
                         "Comma list: resample_weekly[:day], pct_change, per_million, window:A..B, validate");
  ingest_cmd->add_option("--max-missing", ingest.max_missing, "Missing fraction budget per item");
  ingest_cmd->add_option("--item-col", ingest.schema.item_id);
  ingest_cmd->add_option("--date-col", ingest.schema.date);
  ingest_cmd->add_option("--value-col", ingest.schema.value);
  ingest_cmd->add_option("--name-col", ingest.name_col);
  ingest_cmd->add_option("--population-col", ingest.population_col);

  PrecomputeArgs pre;
  auto* pre_cmd = app.add_subcommand("precompute", "Write GuardrailSets and the precompute index");
  pre_cmd->add_option("--dataset", pre.dataset, "Dataset JSON path or id")->required();
  pre_cmd->add_option("--strategies", pre.strategies, "Strategy kinds (default: all)")->delimiter(',');
  pre_cmd->add_option("--focal", pre.focals, "Focal item ids")->delimiter(',');
  pre_cmd->add_flag("--all", pre.all, "Every item as focal");
  pre_cmd->add_option("--seed", pre.seed);
  pre_cmd->add_option("--out", pre.out, "Output directory (default: <data>/precomputed)");
  add_provider_options(pre_cmd, pre.provider);

  ChartArgs chart;
  auto* chart_cmd = app.add_subcommand("chart", "ChartSpec JSON or SVG for one focal item");
  chart_cmd->add_option("--dataset", chart.dataset, "Dataset JSON path or id")->required();
  chart_cmd->add_option("--focal", chart.focal)->required();
  chart_cmd->add_option("--strategy", chart.strategy, "Strategy kind or none");
  chart_cmd->add_option("--format", chart.format, "json or svg");
  chart_cmd->add_option("--n", chart.n);
  chart_cmd->add_option("--seed", chart.seed);
  chart_cmd->add_option("--caption", chart.caption);
  chart_cmd->add_option("--out", chart.out, "Output file (default: stdout)");
  add_provider_options(chart_cmd, chart.provider);

  FocalArgs focal;
  auto* focal_cmd = app.add_subcommand("focal-select", "Rank focal candidates against criteria");
  focal_cmd->add_option("--dataset", focal.dataset, "Dataset JSON path or id")->required();
  focal_cmd->add_option("--criteria", focal.criteria, "Criteria JSON");
  focal_cmd->add_option("--target", focal.target, "Target percentile");
  focal_cmd->add_option("--count", focal.count);
  focal_cmd->add_option("--smoothness-max", focal.smoothness_max);
  focal_cmd->add_option("--floor-min", focal.floor_min);
  focal_cmd->add_option("--out", focal.out, "Output file (default: stdout)");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Read-only HTTP JSON API");
  serve_cmd->add_option("--bind", serve.bind);
  serve_cmd->add_option("--port", serve.port);
  serve_cmd->add_option("--app-dir", serve.app_dir, "Static UI bundle served under /app");
  serve_cmd->add_option("--static-map", serve.static_map);
  serve_cmd->add_option("--precompute-dir", serve.precompute_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto logger = spdlog::stderr_color_mt("guardrail");
  spdlog::set_default_logger(logger);
  try {
    if (g.config_path) {
      require_file(*g.config_path, "config file");
      g.config = read_json_file(*g.config_path);
      if (!app.get_option("--log-level")->count() && g.config.contains("log_level")) {
        g.log_level = g.config.at("log_level").get<std::string>();
      }
    }
    spdlog::set_level(spdlog::level::from_str(g.log_level));

    if (*ingest_cmd) return run_ingest(ingest);
    if (*pre_cmd) return run_precompute(g, pre);
    if (*chart_cmd) return run_chart(g, chart);
    if (*focal_cmd) return run_focal_select(g, focal);
    if (*serve_cmd) return run_serve(g, serve);
  } catch (const UsageError& e) {
    std::cerr << "guardrail: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "guardrail: error: " << e.what() << "\n";
    return e.kind() == ErrorKind::not_found || e.kind() == ErrorKind::invalid_argument ? kExitUsage
                                                                                        : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "guardrail: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
