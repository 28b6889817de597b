#include "guardrail/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "guardrail/consensus.hpp"
#include "guardrail/error.hpp"
#include "guardrail/percentile.hpp"
#include "guardrail/random.hpp"

namespace guardrail {

namespace {

void require_focal(const TimeSeriesDataset& ds, const std::string& focal_id) {
  if (!ds.contains(focal_id)) {
    fail(ErrorKind::not_found, "focal item '" + focal_id + "' is not in dataset '" + ds.id() + "'");
  }
}

// Non-focal item indices in dataset order.
std::vector<std::size_t> candidates(const TimeSeriesDataset& ds, const std::string& focal_id) {
  std::vector<std::size_t> out;
  out.reserve(ds.item_count());
  for (std::size_t i = 0; i < ds.item_count(); ++i) {
    if (ds.items()[i].id != focal_id) out.push_back(i);
  }
  return out;
}

ContextSeries item_entry(const ItemSeries& item, std::string label) {
  return {std::move(label), item.id, item.values, false, std::nullopt};
}

double sse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

// Costs this close (relative) count as tied, so the item_id tie-break is not
// decided by rounding: two members of a 2-item cluster are equidistant from
// its centroid, and an even-count median line is equidistant from two items.
constexpr double kTieTolerance = 1e-9;

bool within_tie(double cost, double best) { return cost <= best + kTieTolerance * std::abs(best); }

// Among `pool`, the index whose cost is minimal; near-ties go to the lowest id.
template <typename Cost>
std::size_t argmin_by_id(const TimeSeriesDataset& ds, const std::vector<std::size_t>& pool,
                         Cost cost, double* best_cost) {
  double best = std::numeric_limits<double>::infinity();
  for (auto i : pool) best = std::min(best, cost(i));
  std::size_t pick = pool.front();
  bool found = false;
  for (auto i : pool) {
    if (!within_tie(cost(i), best)) continue;
    if (!found || ds.items()[i].id < ds.items()[pick].id) pick = i;
    found = true;
  }
  if (best_cost) *best_cost = cost(pick);
  return pick;
}

}  // namespace

GuardrailSet random_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                              const StrategySpec& spec_in) {
  spec_in.check();
  require_focal(ds, focal_id);
  ds.require_complete("random_exemplars");
  StrategySpec spec = spec_in;
  spec.kind = StrategyKind::random;
  if (!spec.seed) spec.seed = default_seed(ds.id(), focal_id);

  auto pool = candidates(ds, focal_id);
  if (spec.n > pool.size()) {
    fail(ErrorKind::invalid_argument, "n=" + std::to_string(spec.n) + " exceeds the " +
                                          std::to_string(pool.size()) + " non-focal items");
  }
  Rng rng(*spec.seed);
  GuardrailSet set{spec, focal_id, {}, {}, std::nullopt};
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    const auto& item = ds.items()[pool[i]];
    set.context.push_back(item_entry(item, item.display_name));
    set.provenance.push_back({{"index", i},
                              {"item_id", item.id},
                              {"seed", *spec.seed},
                              {"explanation", "uniform draw " + std::to_string(i + 1) + " of " +
                                                  std::to_string(spec.n) + " without replacement"}});
  }
  return set;
}

GuardrailSet percentile_markers(const TimeSeriesDataset& ds, const StrategySpec& spec_in) {
  spec_in.check();
  if (ds.item_count() < 2) {
    fail(ErrorKind::invalid_argument, "percentile markers need at least 2 items");
  }
  StrategySpec spec = spec_in;
  spec.kind = StrategyKind::percentile_markers;
  auto lines = percentile_lines(ds, spec.percentiles);
  GuardrailSet set{spec, {}, {}, {}, std::nullopt};
  for (std::size_t p = 0; p < lines.size(); ++p) {
    const double pct = spec.percentiles[p];
    set.context.push_back({percentile_label(pct), std::nullopt, std::move(lines[p]), true, pct});
    set.provenance.push_back(
        {{"index", p},
         {"percentile", pct},
         {"explanation", percentile_label(pct) + " of all " + std::to_string(ds.item_count()) +
                             " items at each timestep (linear interpolation)"}});
  }
  return set;
}

GuardrailSet percentile_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                                  const StrategySpec& spec_in) {
  spec_in.check();
  require_focal(ds, focal_id);
  StrategySpec spec = spec_in;
  spec.kind = StrategyKind::percentile_exemplars;
  const auto pool = candidates(ds, focal_id);
  const auto lines_n = spec.percentiles.size();
  if (lines_n > pool.size()) {
    fail(ErrorKind::invalid_argument, std::to_string(lines_n) + " percentile lines exceed the " +
                                          std::to_string(pool.size()) + " candidate items");
  }
  const auto lines = percentile_lines(ds, spec.percentiles);

  struct Pair {
    double sse;
    std::size_t item;  // dataset index
    std::size_t line;
  };
  std::vector<Pair> pairs;
  pairs.reserve(pool.size() * lines_n);
  for (auto i : pool) {
    for (std::size_t l = 0; l < lines_n; ++l) pairs.push_back({sse(ds.items()[i].values, lines[l]), i, l});
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.sse != b.sse) return a.sse < b.sse;
    const auto& ia = ds.items()[a.item].id;
    const auto& ib = ds.items()[b.item].id;
    if (ia != ib) return ia < ib;
    return a.line < b.line;
  });

  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> line_item(lines_n, kUnset), line_order(lines_n, 0);
  std::vector<double> line_sse(lines_n, 0.0);
  std::vector<char> used(ds.item_count(), 0);
  std::size_t assigned = 0;
  auto open = [&](const Pair& p) { return !used[p.item] && line_item[p.line] == kUnset; };
  std::size_t head = 0;
  while (assigned < lines_n) {
    while (!open(pairs[head])) ++head;
    std::size_t pick = head;
    for (std::size_t j = head + 1; j < pairs.size() && within_tie(pairs[j].sse, pairs[head].sse); ++j) {
      if (!open(pairs[j])) continue;
      const auto& ij = ds.items()[pairs[j].item].id;
      const auto& ip = ds.items()[pairs[pick].item].id;
      if (ij < ip || (ij == ip && pairs[j].line < pairs[pick].line)) pick = j;
    }
    const auto& p = pairs[pick];
    used[p.item] = 1;
    line_item[p.line] = p.item;
    line_sse[p.line] = p.sse;
    line_order[p.line] = assigned++;
  }

  GuardrailSet set{spec, focal_id, {}, {}, std::nullopt};
  for (std::size_t l = 0; l < lines_n; ++l) {
    const auto& item = ds.items()[line_item[l]];
    const double pct = spec.percentiles[l];
    auto entry = item_entry(item, item.display_name + " (" + percentile_label(pct) + ")");
    entry.percentile_tag = pct;
    set.context.push_back(std::move(entry));
    set.provenance.push_back({{"index", l},
                              {"item_id", item.id},
                              {"percentile", pct},
                              {"sse", line_sse[l]},
                              {"assignment_order", line_order[l]},
                              {"explanation", "closest to " + percentile_label(pct) +
                                                  " line, SSE=" + shortest(line_sse[l])}});
  }
  return set;
}

GuardrailSet cluster_representatives(const TimeSeriesDataset& ds, const std::string& focal_id,
                                     const StrategySpec& spec_in, const KMeansOptions& options) {
  spec_in.check();
  require_focal(ds, focal_id);
  ds.require_complete("cluster_representatives");
  StrategySpec spec = spec_in;
  spec.kind = StrategyKind::cluster_representatives;
  if (!spec.seed) spec.seed = default_seed(ds.id(), focal_id);
  const auto k = spec.cluster_count();
  if (k > ds.item_count() - 1) {
    fail(ErrorKind::invalid_argument, "k=" + std::to_string(k) + " exceeds the " +
                                          std::to_string(ds.item_count() - 1) +
                                          " non-focal items");
  }

  const auto rows = value_rows(ds);
  const auto km = kmeans_timeseries(rows, k, *spec.seed, options);
  const auto focal = *ds.index_of(focal_id);
  const auto& items = ds.items();

  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rep(k, kUnset);
  std::vector<double> rep_dist(k, 0.0);
  std::vector<char> substituted(k, 0), used(items.size(), 0);

  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (km.assignments[i] == c && i != focal) members.push_back(i);
    }
    if (members.empty()) continue;
    rep[c] = argmin_by_id(ds, members,
                          [&](std::size_t i) { return std::sqrt(squared_distance(rows[i], km.centroids[c])); },
                          &rep_dist[c]);
    used[rep[c]] = 1;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (rep[c] != kUnset) continue;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i != focal && !used[i]) free.push_back(i);
    }
    rep[c] = argmin_by_id(ds, free,
                          [&](std::size_t i) { return std::sqrt(squared_distance(rows[i], km.centroids[c])); },
                          &rep_dist[c]);
    used[rep[c]] = 1;
    substituted[c] = 1;
  }

  GuardrailSet set{spec, focal_id, {}, {}, std::nullopt};
  for (std::size_t c = 0; c < k; ++c) {
    const auto& item = items[rep[c]];
    const auto members = static_cast<std::size_t>(
        std::count(km.assignments.begin(), km.assignments.end(), c));
    set.context.push_back(item_entry(item, item.display_name));
    std::string why = substituted[c]
                          ? "nearest eligible item to cluster " + std::to_string(c) +
                                " centroid (cluster holds only the focal item)"
                          : "cluster " + std::to_string(c) + " representative";
    set.provenance.push_back({{"index", c},
                              {"item_id", item.id},
                              {"cluster", c},
                              {"cluster_size", members},
                              {"distance_to_centroid", rep_dist[c]},
                              {"substitute", static_cast<bool>(substituted[c])},
                              {"inertia", km.inertia},
                              {"explanation", why + ", distance-to-centroid=" + shortest(rep_dist[c])}});
  }
  return set;
}

GuardrailSet semantic_exemplars(const TimeSeriesDataset& ds, const std::string& focal_id,
                                const StrategySpec& spec_in, const PeerProvider& provider,
                                std::string_view task_context) {
  spec_in.check();
  require_focal(ds, focal_id);
  StrategySpec spec = spec_in;
  spec.kind = StrategyKind::semantic;

  const auto lists = provider.sample(focal_id, task_context, spec.consensus.samples);
  auto ranked = rank_candidates(lists);
  std::erase_if(ranked, [&](const ConsensusEntry& e) {
    return e.id == focal_id || !ds.contains(e.id);
  });
  const auto threshold = spec.consensus.threshold;
  const auto retained = static_cast<std::size_t>(std::count_if(
      ranked.begin(), ranked.end(), [&](const ConsensusEntry& e) { return e.votes >= threshold; }));
  if (retained == 0) {
    fail(ErrorKind::not_found, "no consensus peer of '" + focal_id + "' (threshold " +
                                   std::to_string(threshold) + " of " +
                                   std::to_string(lists.size()) + ") is present in dataset '" +
                                   ds.id() + "'");
  }

  GuardrailSet set{spec, focal_id, {}, {}, std::nullopt};
  const auto take = std::min(spec.n, ranked.size());
  const auto shortfall = spec.n > retained ? spec.n - retained : 0;
  for (std::size_t i = 0; i < take; ++i) {
    const auto& e = ranked[i];
    const auto& item = ds.item(e.id);
    const bool topped_up = e.votes < threshold;
    set.context.push_back(item_entry(item, item.display_name));
    Json prov = {{"index", i},
                 {"item_id", e.id},
                 {"votes", e.votes},
                 {"samples", lists.size()},
                 {"mean_rank", e.mean_rank},
                 {"retained", !topped_up},
                 {"explanation", std::string(topped_up ? "top-up below threshold, " : "consensus peer, ") +
                                     std::to_string(e.votes) + "/" + std::to_string(lists.size()) +
                                     " votes"}};
    if (shortfall > 0) prov["shortfall"] = shortfall;
    set.provenance.push_back(std::move(prov));
  }

  Json raw = Json::array();
  for (const auto& l : lists) raw.push_back(l.raw_response ? Json(*l.raw_response) : Json(nullptr));
  set.audit = Json{{"source", lists.empty() ? "none" : std::string(to_string(lists.front().source))},
                   {"samples", lists.size()},
                   {"threshold", threshold},
                   {"retained", retained},
                   {"shortfall", shortfall},
                   {"raw_responses", std::move(raw)}};
  return set;
}

GuardrailSet compute_guardrails(const TimeSeriesDataset& ds, const std::string& focal_id,
                                const StrategySpec& spec, const PeerProvider* provider,
                                std::string_view task_context) {
  require_focal(ds, focal_id);
  switch (spec.kind) {
    case StrategyKind::random:
      return random_exemplars(ds, focal_id, spec);
    case StrategyKind::percentile_markers: {
      auto set = percentile_markers(ds, spec);
      set.focal_id = focal_id;
      return set;
    }
    case StrategyKind::percentile_exemplars:
      return percentile_exemplars(ds, focal_id, spec);
    case StrategyKind::cluster_representatives:
      return cluster_representatives(ds, focal_id, spec);
    case StrategyKind::semantic:
      if (!provider) fail(ErrorKind::invalid_argument, "semantic strategy needs a peer provider");
      return semantic_exemplars(ds, focal_id, spec, *provider, task_context);
  }
  fail(ErrorKind::invalid_argument, "unknown strategy");
}

}  // namespace guardrail
