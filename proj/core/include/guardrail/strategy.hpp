#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardrail/canonical.hpp"

namespace guardrail {

enum class StrategyKind {
  random,
  percentile_markers,
  percentile_exemplars,
  cluster_representatives,
  semantic,
};

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view text);
const std::vector<StrategyKind>& all_strategy_kinds();

struct ConsensusParams {
  int samples = 10;
  int threshold = 7;
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::random;
  std::size_t n = 5;
  std::vector<double> percentiles = {5, 25, 50, 75, 95};
  std::optional<std::size_t> k;        // cluster count, defaults to n
  std::optional<std::uint64_t> seed;   // derived from (dataset, focal) when unset
  ConsensusParams consensus;

  std::size_t cluster_count() const { return k.value_or(n); }

  // Checks the count-independent invariants (percentile ordering and range,
  // consensus bounds, n and k positive). Throws Error(invalid_argument).
  void check() const;
};

StrategySpec default_spec(StrategyKind kind);

struct ContextSeries {
  std::string label;
  std::optional<std::string> item_id;  // set for real-item entries
  std::vector<double> values;
  bool is_synthetic = false;
  std::optional<double> percentile_tag;
};

struct GuardrailSet {
  StrategySpec strategy;
  std::string focal_id;
  std::vector<ContextSeries> context;
  std::vector<Json> provenance;  // one record per context entry
  std::optional<Json> audit;     // semantic strategy only
};

// 64-bit FNV-1a of dataset_id followed by focal_id.
std::uint64_t default_seed(std::string_view dataset_id, std::string_view focal_id);

// "p5", "p12.5", ...
std::string percentile_label(double p);

Json to_json(const StrategySpec& spec);
StrategySpec strategy_spec_from_json(const Json& j);
Json to_json(const ContextSeries& c);
Json to_json(const GuardrailSet& set);

}  // namespace guardrail
