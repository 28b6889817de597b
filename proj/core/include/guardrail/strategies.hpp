#pragma once

#include <string>
#include <string_view>

#include "guardrail/dataset.hpp"
#include "guardrail/kmeans.hpp"
#include "guardrail/peers.hpp"
#include "guardrail/strategy.hpp"

namespace guardrail {

// All strategies require a validated dataset (no masked cells) and never
// place the focal item among context entries. Ties break on ascending
// item_id.

// n distinct non-focal items sampled uniformly without replacement (partial
// Fisher-Yates over dataset order). The seed defaults to
// default_seed(dataset_id, focal_id).
GuardrailSet random_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                              const StrategySpec& spec);

// One synthetic line per requested percentile, computed over every item
// (focal included) at each timestep.
GuardrailSet percentile_markers(const TimeSeriesDataset& ds, const StrategySpec& spec);

// For each percentile line, the non-focal item with minimal SSE to it.
// Distinct assignment is greedy over all (item, line) pairs in ascending
// (SSE, item_id, percentile) order. Context is ordered by percentile.
GuardrailSet percentile_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                                  const StrategySpec& spec);

// k-means over every item (focal included), then per cluster the eligible
// member nearest (L2) to the centroid. A cluster whose only member is the
// focal borrows the nearest unselected eligible item. Context follows cluster
// index.
GuardrailSet cluster_representatives(const TimeSeriesDataset& ds, const std::string& focal_id,
                                     const StrategySpec& spec,
                                     const KMeansOptions& options = {});

// Draws spec.consensus.samples candidate lists, keeps entities meeting the
// threshold that exist in the dataset, ranks them, truncates to n, and tops up
// from below-threshold entities when short (recorded in provenance).
GuardrailSet semantic_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                                const StrategySpec& spec, const PeerProvider& provider,
                                std::string_view task_context = {});

// Dispatch on spec.kind. `provider` is required for the semantic strategy.
GuardrailSet compute_guardrails(const TimeSeriesDataset& ds, const std::string& focal_id,
                                const StrategySpec& spec, const PeerProvider* provider = nullptr,
                                std::string_view task_context = {});

}  // namespace guardrail
