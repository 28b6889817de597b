#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guardrail/canonical.hpp"
#include "guardrail/dataset.hpp"

namespace guardrail {

struct FocalCriteria {
  double target_percentile = 50.0;
  std::size_t count = 1;
  double smoothness_max = 2.0;
  std::optional<double> floor_min;  // every value must be >= floor_min

  void check() const;
};

FocalCriteria focal_criteria_from_json(const Json& j);
Json to_json(const FocalCriteria& c);

struct RankJudgment {
  std::string item_id;
  double true_rank = 0.0;
  std::optional<double> estimate;
  std::optional<double> abs_error;
};

// Item value at the final timestep (period-end cumulative value or period-end
// percent change).
double performance_score(const TimeSeriesDataset& ds, const std::string& item_id);

// 100 * (#strictly worse + 0.5 * #ties excluding self) / (N - 1), with
// "worse" following ds.direction().
double percentile_rank(const TimeSeriesDataset& ds, const std::string& item_id);

// Total variation over absolute net change; +infinity when net change is 0.
double smoothness(const std::vector<double>& series);

// Survivors of the floor and smoothness filters ordered by distance of their
// percentile rank from the target (ties by id); first `count` returned.
std::vector<std::string> select_focal_items(const TimeSeriesDataset& ds,
                                            const FocalCriteria& criteria);

// Full ranked survivor list (no truncation), used for candidate reports.
struct FocalCandidate {
  std::string item_id;
  double rank;
  double smoothness;
  double distance;
};
std::vector<FocalCandidate> focal_candidates(const TimeSeriesDataset& ds,
                                             const FocalCriteria& criteria);

double rank_error(const RankJudgment& judgment);

Json to_json(const RankJudgment& j);
Json rank_report(const std::vector<RankJudgment>& judgments);

}  // namespace guardrail
