#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guardrail/canonical.hpp"
#include "guardrail/dataset.hpp"
#include "guardrail/peers.hpp"
#include "guardrail/strategy.hpp"

namespace guardrail {

// Canonical GuardrailSet JSON for one request; the single serialization path
// shared by CLI and HTTP.
std::string guardrail_json(const TimeSeriesDataset& ds, const std::string& focal_id,
                           const StrategySpec& spec, const PeerProvider* provider = nullptr);

struct IndexEntry {
  std::string digest;  // SHA-256 of canonical GuardrailSet JSON
  std::string key;     // storage path relative to the index directory
};

// dataset_id -> focal_id -> strategy kind -> entry.
class PrecomputeIndex {
 public:
  using Table = std::map<std::string, std::map<std::string, std::map<std::string, IndexEntry>>>;

  static PrecomputeIndex load(const std::filesystem::path& file);  // empty if absent
  void save(const std::filesystem::path& file) const;

  const IndexEntry* find(const std::string& dataset_id, const std::string& focal_id,
                         StrategyKind kind) const;
  void put(const std::string& dataset_id, const std::string& focal_id, StrategyKind kind,
           IndexEntry entry);
  const Table& table() const { return table_; }

  friend bool operator==(const PrecomputeIndex&, const PrecomputeIndex&);

 private:
  Table table_;
};

Json to_json(const PrecomputeIndex& index);

struct PrecomputeRequest {
  std::vector<StrategyKind> strategies;
  std::vector<std::string> focals;  // empty with all_items = true means every item
  bool all_items = false;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir;
  const PeerProvider* provider = nullptr;
};

struct PrecomputeStats {
  std::size_t written = 0;
  std::size_t unchanged = 0;
  std::vector<std::string> skipped;  // "focal/kind: reason"
  bool index_written = false;
};

// Writes <out_dir>/<dataset>/<focal>/<kind>.json plus <out_dir>/index.json.
// Files whose digest already matches the index and disk are left untouched.
// With all_items, semantic requests the provider cannot serve are skipped and
// reported instead of failing the run.
PrecomputeStats precompute(const TimeSeriesDataset& ds, const PrecomputeRequest& request);

std::string storage_key(const std::string& dataset_id, const std::string& focal_id,
                        StrategyKind kind);

}  // namespace guardrail
