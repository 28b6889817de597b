#include "guardrail/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "guardrail/error.hpp"

namespace guardrail {

void FocalCriteria::check() const {
  if (count < 1) fail(ErrorKind::invalid_argument, "criteria count must be >= 1");
  if (!(target_percentile > 0.0 && target_percentile < 100.0)) {
    fail(ErrorKind::invalid_argument, "target_percentile must lie in (0, 100)");
  }
  if (!(smoothness_max >= 1.0)) {
    fail(ErrorKind::invalid_argument, "smoothness_max below 1 rejects every series");
  }
}

FocalCriteria focal_criteria_from_json(const Json& j) {
  try {
    FocalCriteria c;
    c.target_percentile = j.at("target_percentile").get<double>();
    c.count = j.value("count", c.count);
    c.smoothness_max = j.value("smoothness_max", c.smoothness_max);
    if (j.contains("floor_min") && !j.at("floor_min").is_null()) {
      c.floor_min = j.at("floor_min").get<double>();
    }
    c.check();
    return c;
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed focal criteria: ") + e.what());
  }
}

Json to_json(const FocalCriteria& c) {
  Json j = {{"target_percentile", c.target_percentile},
            {"count", c.count},
            {"smoothness_max", c.smoothness_max}};
  j["floor_min"] = c.floor_min ? Json(*c.floor_min) : Json(nullptr);
  return j;
}

double performance_score(const TimeSeriesDataset& ds, const std::string& item_id) {
  const auto& item = ds.item(item_id);
  if (item.values.empty()) fail(ErrorKind::invalid_argument, "dataset has no timesteps");
  if (item.is_missing(item.values.size() - 1)) {
    fail(ErrorKind::invalid_argument, "item '" + item_id + "' has no final-timestep value");
  }
  return item.values.back();
}

double percentile_rank(const TimeSeriesDataset& ds, const std::string& item_id) {
  if (ds.item_count() < 2) fail(ErrorKind::invalid_argument, "percentile rank needs >= 2 items");
  const double self = performance_score(ds, item_id);
  const bool higher_better = ds.direction() == Direction::higher_is_better;
  double worse = 0.0, ties = 0.0;
  for (const auto& other : ds.items()) {
    if (other.id == item_id) continue;
    const double s = performance_score(ds, other.id);
    if (s == self) {
      ties += 1.0;
    } else if (higher_better ? s < self : s > self) {
      worse += 1.0;
    }
  }
  return 100.0 * (worse + 0.5 * ties) / static_cast<double>(ds.item_count() - 1);
}

double smoothness(const std::vector<double>& series) {
  if (series.size() < 3) {
    fail(ErrorKind::invalid_argument, "smoothness needs at least 3 values");
  }
  double tv = 0.0;
  for (std::size_t t = 1; t < series.size(); ++t) tv += std::abs(series[t] - series[t - 1]);
  const double net = series.back() - series.front();
  if (net == 0.0) return std::numeric_limits<double>::infinity();
  return tv / std::abs(net);
}

std::vector<FocalCandidate> focal_candidates(const TimeSeriesDataset& ds,
                                             const FocalCriteria& criteria) {
  criteria.check();
  ds.require_complete("focal selection");
  std::vector<FocalCandidate> out;
  for (const auto& item : ds.items()) {
    if (criteria.floor_min &&
        std::any_of(item.values.begin(), item.values.end(),
                    [&](double v) { return v < *criteria.floor_min; })) {
      continue;
    }
    const double s = smoothness(item.values);
    if (!(s <= criteria.smoothness_max)) continue;
    const double rank = percentile_rank(ds, item.id);
    out.push_back({item.id, rank, s, std::abs(rank - criteria.target_percentile)});
  }
  std::sort(out.begin(), out.end(), [](const FocalCandidate& a, const FocalCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.item_id < b.item_id;
  });
  return out;
}

std::vector<std::string> select_focal_items(const TimeSeriesDataset& ds,
                                            const FocalCriteria& criteria) {
  auto ranked = focal_candidates(ds, criteria);
  if (ranked.size() < criteria.count) {
    std::size_t floor_fail = 0, smooth_fail = 0;
    for (const auto& item : ds.items()) {
      const bool below = criteria.floor_min &&
                         std::any_of(item.values.begin(), item.values.end(),
                                     [&](double v) { return v < *criteria.floor_min; });
      if (below) {
        ++floor_fail;
      } else if (!(smoothness(item.values) <= criteria.smoothness_max)) {
        ++smooth_fail;
      }
    }
    const std::string binding = floor_fail >= smooth_fail ? "floor_min" : "smoothness_max";
    fail(ErrorKind::invalid_argument,
         "only " + std::to_string(ranked.size()) + " of " + std::to_string(ds.item_count()) +
             " items satisfy the criteria (need " + std::to_string(criteria.count) + "); " +
             std::to_string(floor_fail) + " rejected by floor_min, " + std::to_string(smooth_fail) +
             " by smoothness_max; binding constraint: " + binding);
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < criteria.count; ++i) ids.push_back(ranked[i].item_id);
  return ids;
}

double rank_error(const RankJudgment& judgment) {
  if (!judgment.estimate) {
    fail(ErrorKind::invalid_argument, "judgment for '" + judgment.item_id + "' has no estimate");
  }
  return std::abs(*judgment.estimate - judgment.true_rank);
}

Json to_json(const RankJudgment& j) {
  Json out = {{"item_id", j.item_id}, {"true_rank", j.true_rank}};
  out["estimate"] = j.estimate ? Json(*j.estimate) : Json(nullptr);
  // Derived rather than trusted so the report always honors |estimate - true_rank|.
  out["abs_error"] = j.estimate ? Json(rank_error(j)) : Json(nullptr);
  return out;
}

Json rank_report(const std::vector<RankJudgment>& judgments) {
  Json arr = Json::array();
  for (const auto& j : judgments) arr.push_back(to_json(j));
  return arr;
}

}  // namespace guardrail
