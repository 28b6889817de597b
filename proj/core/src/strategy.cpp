#include "guardrail/strategy.hpp"

#include <cmath>

#include "guardrail/error.hpp"

namespace guardrail {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::random: return "random";
    case StrategyKind::percentile_markers: return "percentile_markers";
    case StrategyKind::percentile_exemplars: return "percentile_exemplars";
    case StrategyKind::cluster_representatives: return "cluster_representatives";
    case StrategyKind::semantic: return "semantic";
  }
  return "unknown";
}

const std::vector<StrategyKind>& all_strategy_kinds() {
  static const std::vector<StrategyKind> kinds = {
      StrategyKind::random, StrategyKind::percentile_markers, StrategyKind::percentile_exemplars,
      StrategyKind::cluster_representatives, StrategyKind::semantic};
  return kinds;
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) {
  for (auto k : all_strategy_kinds()) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void StrategySpec::check() const {
  if (n < 1) fail(ErrorKind::invalid_argument, "n must be at least 1");
  if (k && *k < 1) fail(ErrorKind::invalid_argument, "k must be at least 1");
  if (percentiles.empty()) fail(ErrorKind::invalid_argument, "percentile list is empty");
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    const double p = percentiles[i];
    if (!(p > 0.0 && p < 100.0)) {
      fail(ErrorKind::invalid_argument, "percentile " + percentile_label(p) + " outside (0, 100)");
    }
    if (i > 0 && !(percentiles[i - 1] < p)) {
      fail(ErrorKind::invalid_argument, "percentiles must be strictly ascending");
    }
  }
  if (consensus.samples < 1) fail(ErrorKind::invalid_argument, "consensus samples must be >= 1");
  if (consensus.threshold < 1 || consensus.threshold > consensus.samples) {
    fail(ErrorKind::invalid_argument, "consensus threshold must lie in [1, samples]");
  }
}

StrategySpec default_spec(StrategyKind kind) {
  StrategySpec spec;
  spec.kind = kind;
  return spec;
}

std::uint64_t default_seed(std::string_view dataset_id, std::string_view focal_id) {
  std::string bytes(dataset_id);
  bytes.append(focal_id);
  return fnv1a64(bytes);
}

std::string percentile_label(double p) { return "p" + shortest(p); }

Json to_json(const StrategySpec& spec) {
  Json j = {{"kind", std::string(to_string(spec.kind))},
            {"n", spec.n},
            {"percentiles", spec.percentiles},
            {"k", spec.cluster_count()},
            {"consensus", {{"samples", spec.consensus.samples},
                           {"threshold", spec.consensus.threshold}}}};
  if (spec.seed) j["seed"] = *spec.seed;
  return j;
}

StrategySpec strategy_spec_from_json(const Json& j) {
  try {
    StrategySpec spec;
    auto kind = parse_strategy_kind(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::invalid_input, "unknown strategy kind in spec JSON");
    spec.kind = *kind;
    spec.n = j.value("n", spec.n);
    if (j.contains("percentiles")) spec.percentiles = j.at("percentiles").get<std::vector<double>>();
    if (j.contains("k")) spec.k = j.at("k").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("consensus")) {
      spec.consensus.samples = j.at("consensus").value("samples", spec.consensus.samples);
      spec.consensus.threshold = j.at("consensus").value("threshold", spec.consensus.threshold);
    }
    spec.check();
    return spec;
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed strategy spec: ") + e.what());
  }
}

Json to_json(const ContextSeries& c) {
  Json j = {{"label", c.label}, {"values", c.values}, {"is_synthetic", c.is_synthetic}};
  if (c.item_id) j["item_id"] = *c.item_id;
  if (c.percentile_tag) j["percentile_tag"] = *c.percentile_tag;
  return j;
}

Json to_json(const GuardrailSet& set) {
  Json context = Json::array();
  for (const auto& c : set.context) context.push_back(to_json(c));
  Json provenance = Json::array();
  for (const auto& p : set.provenance) provenance.push_back(p);
  Json j = {{"strategy", to_json(set.strategy)},
            {"focal_id", set.focal_id},
            {"context", std::move(context)},
            {"provenance", std::move(provenance)}};
  if (set.audit) j["audit"] = *set.audit;
  return j;
}

}  // namespace guardrail
