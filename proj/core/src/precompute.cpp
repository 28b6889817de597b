#include "guardrail/precompute.hpp"

#include <fstream>

#include "guardrail/error.hpp"
#include "guardrail/strategies.hpp"

namespace guardrail {

namespace fs = std::filesystem;

std::string guardrail_json(const TimeSeriesDataset& ds, const std::string& focal_id,
                           const StrategySpec& spec, const PeerProvider* provider) {
  return canonical_dump(to_json(compute_guardrails(ds, focal_id, spec, provider)));
}

namespace {

std::string safe_component(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path.string() + "'");
  out << content;
}

bool file_has(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  if (fs::file_size(path, ec) != content.size()) return false;
  return read_file(path.string()) == content;
}

}  // namespace

std::string storage_key(const std::string& dataset_id, const std::string& focal_id,
                        StrategyKind kind) {
  return safe_component(dataset_id) + "/" + safe_component(focal_id) + "/" +
         std::string(to_string(kind)) + ".json";
}

PrecomputeIndex PrecomputeIndex::load(const fs::path& file) {
  PrecomputeIndex index;
  if (!fs::exists(file)) return index;
  const auto j = read_json_file(file.string());
  try {
    for (const auto& [ds, focals] : j.items()) {
      for (const auto& [focal, kinds] : focals.items()) {
        for (const auto& [kind, e] : kinds.items()) {
          index.table_[ds][focal][kind] = {e.at("digest").get<std::string>(),
                                           e.at("key").get<std::string>()};
        }
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, "malformed precompute index: " + std::string(e.what()));
  }
  return index;
}

Json to_json(const PrecomputeIndex& index) {
  Json j = Json::object();
  for (const auto& [ds, focals] : index.table()) {
    for (const auto& [focal, kinds] : focals) {
      for (const auto& [kind, e] : kinds) {
        j[ds][focal][kind] = {{"digest", e.digest}, {"key", e.key}};
      }
    }
  }
  return j;
}

void PrecomputeIndex::save(const fs::path& file) const {
  write_file(file, canonical_dump(to_json(*this)) + "\n");
}

const IndexEntry* PrecomputeIndex::find(const std::string& dataset_id, const std::string& focal_id,
                                        StrategyKind kind) const {
  auto d = table_.find(dataset_id);
  if (d == table_.end()) return nullptr;
  auto f = d->second.find(focal_id);
  if (f == d->second.end()) return nullptr;
  auto k = f->second.find(std::string(to_string(kind)));
  return k == f->second.end() ? nullptr : &k->second;
}

void PrecomputeIndex::put(const std::string& dataset_id, const std::string& focal_id,
                          StrategyKind kind, IndexEntry entry) {
  table_[dataset_id][focal_id][std::string(to_string(kind))] = std::move(entry);
}

bool operator==(const PrecomputeIndex& a, const PrecomputeIndex& b) {
  if (a.table_.size() != b.table_.size()) return false;
  return to_json(a) == to_json(b);
}

PrecomputeStats precompute(const TimeSeriesDataset& ds, const PrecomputeRequest& request) {
  if (request.strategies.empty()) fail(ErrorKind::invalid_argument, "no strategies requested");
  std::vector<std::string> focals = request.focals;
  if (request.all_items) {
    focals.clear();
    for (const auto& item : ds.items()) focals.push_back(item.id);
  }
  if (focals.empty()) fail(ErrorKind::invalid_argument, "no focal items requested");
  for (const auto& f : focals) ds.item(f);

  const auto index_path = request.out_dir / "index.json";
  auto index = PrecomputeIndex::load(index_path);
  const auto before = index;
  PrecomputeStats stats;

  for (const auto& focal : focals) {
    for (auto kind : request.strategies) {
      StrategySpec spec = default_spec(kind);
      spec.seed = request.seed;
      std::string body;
      try {
        body = guardrail_json(ds, focal, spec, request.provider);
      } catch (const Error& e) {
        if (request.all_items && kind == StrategyKind::semantic) {
          stats.skipped.push_back(focal + "/" + std::string(to_string(kind)) + ": " + e.what());
          continue;
        }
        throw;
      }
      IndexEntry entry{sha256_hex(body), storage_key(ds.id(), focal, kind)};
      const auto path = request.out_dir / entry.key;
      const auto* existing = index.find(ds.id(), focal, kind);
      if (existing && existing->digest == entry.digest && existing->key == entry.key &&
          file_has(path, body)) {
        ++stats.unchanged;
        continue;
      }
      write_file(path, body);
      index.put(ds.id(), focal, kind, std::move(entry));
      ++stats.written;
    }
  }
  if (!(index == before) || !fs::exists(index_path)) {
    index.save(index_path);
    stats.index_written = true;
  }
  return stats;
}

}  // namespace guardrail
