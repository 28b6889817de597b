#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "guardrail/error.hpp"
#include "guardrail/evaluation.hpp"

namespace guardrail {
namespace {

using testing::make_dataset;

// Direct counting oracle for the midrank definition.
double oracle_rank(const std::vector<double>& scores, std::size_t self, bool higher_better) {
  double worse = 0, ties = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j == self) continue;
    if (scores[j] == scores[self]) {
      ties += 1;
    } else if ((scores[j] < scores[self]) == higher_better) {
      worse += 1;
    }
  }
  return 100.0 * (worse + 0.5 * ties) / static_cast<double>(scores.size() - 1);
}

TEST(Performance, FinalValue) {
  auto ds = make_dataset({{0, 10, -10}, {4, 4, 4}});
  EXPECT_EQ(performance_score(ds, "I00"), -10.0);
  EXPECT_EQ(performance_score(ds, "I01"), 4.0);
  EXPECT_THROW(performance_score(ds, "X"), Error);
}

TEST(Rank, ExtremesAndTies) {
  auto ds = make_dataset({{1}, {2}, {3}, {4}});
  EXPECT_EQ(percentile_rank(ds, "I03"), 100.0);
  EXPECT_EQ(percentile_rank(ds, "I00"), 0.0);
  auto tied = make_dataset({{5}, {5}, {5}});
  for (const auto& id : {"I00", "I01", "I02"}) EXPECT_EQ(percentile_rank(tied, id), 50.0);
  auto lower = make_dataset({{1}, {2}, {3}, {4}}, {}, Direction::lower_is_better);
  EXPECT_EQ(percentile_rank(lower, "I00"), 100.0);
  EXPECT_THROW(percentile_rank(make_dataset({{1}}), "I00"), Error);
}

TEST(Smoothness, Definition) {
  EXPECT_EQ(smoothness({0, 5, 10}), 1.0);
  EXPECT_EQ(smoothness({0, 10, 0, 10}), 3.0);
  EXPECT_EQ(smoothness({2, 3, 2}), std::numeric_limits<double>::infinity());
  EXPECT_THROW(smoothness({1, 2}), Error);
}

TEST(FocalSelection, ForcedByFilters) {
  // Only I01 and I03 are monotone and above the floor.
  auto ds = make_dataset({{0, 5, -2, 6}, {0, 1, 2, 3}, {0, -3, -6, -9}, {0, 2, 4, 8}, {0, 9, 0, 9}});
  FocalCriteria c{50, 2, 1.5, -1.0};
  auto picked = select_focal_items(ds, c);
  std::sort(picked.begin(), picked.end());
  EXPECT_EQ(picked, (std::vector<std::string>{"I01", "I03"}));
}

TEST(FocalSelection, ReportsBindingConstraint) {
  auto ds = make_dataset({{0, 10, 0, 10}, {0, 1, 2, 3}});
  FocalCriteria c{50, 2, 2.0, std::nullopt};
  try {
    select_focal_items(ds, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("binding constraint: smoothness_max"), std::string::npos) << e.what();
  }
  c.floor_min = 5.0;
  try {
    select_focal_items(ds, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("binding constraint: floor_min"), std::string::npos) << e.what();
  }
}

TEST(FocalSelection, OrdersByDistanceThenId) {
  auto ds = make_dataset({{0, 1, 2}, {0, 2, 4}, {0, 3, 6}, {0, 4, 8}, {0, 5, 10}});
  // Ranks 0, 25, 50, 75, 100; target 37.5 is equidistant from I01 and I02.
  auto picked = select_focal_items(ds, {37.5, 2, 2.0, std::nullopt});
  EXPECT_EQ(picked, (std::vector<std::string>{"I01", "I02"}));
  auto all = focal_candidates(ds, {37.5, 1, 2.0, std::nullopt});
  EXPECT_EQ(all.size(), 5u);
  EXPECT_EQ(all.back().item_id, "I04");
}

TEST(Criteria, JsonAndChecks) {
  auto c = focal_criteria_from_json(Json::parse(R"({"target_percentile":35,"count":3,"floor_min":-1})"));
  EXPECT_EQ(c.count, 3u);
  EXPECT_EQ(c.smoothness_max, 2.0);
  EXPECT_EQ(c.floor_min, -1.0);
  EXPECT_THROW(focal_criteria_from_json(Json::parse(R"({"target_percentile":100})")), Error);
  EXPECT_THROW(focal_criteria_from_json(Json::parse(R"({"target_percentile":50,"count":0})")), Error);
}

TEST(RankError, AbsoluteDifference) {
  EXPECT_EQ(rank_error({"A", 35, 35.0, std::nullopt}), 0.0);
  EXPECT_EQ(rank_error({"A", 65, 40.0, std::nullopt}), 25.0);
  EXPECT_THROW(rank_error({"A", 65, std::nullopt, std::nullopt}), Error);
  auto report = rank_report({{"A", 65, 40.0, std::nullopt}, {"B", 10, std::nullopt, std::nullopt}});
  EXPECT_EQ(report[0]["abs_error"], 25.0);
  EXPECT_TRUE(report[1]["abs_error"].is_null());
}

TEST(RankProperty, MatchesCountingOracle) {
  std::mt19937_64 gen(41);
  for (int round = 0; round < 300; ++round) {
    const auto n = testing::uniform_index(gen, 2, 30);
    std::vector<std::vector<double>> rows;
    std::vector<double> finals;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(testing::uniform_index(gen, 0, 8));  // ties likely
      rows.push_back({0.0, v});
      finals.push_back(v);
    }
    const bool hib = round % 2 == 0;
    auto ds = make_dataset(rows, {}, hib ? Direction::higher_is_better : Direction::lower_is_better);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_DOUBLE_EQ(percentile_rank(ds, testing::item_name(i)), oracle_rank(finals, i, hib));
    }
  }
}

TEST(RankProperty, DirectionReversalMirrorsRanks) {
  std::mt19937_64 gen(43);
  for (int round = 0; round < 100; ++round) {
    auto rows = testing::random_rows(gen, testing::uniform_index(gen, 2, 20), 3);
    auto up = make_dataset(rows), down = make_dataset(rows, {}, Direction::lower_is_better);
    for (const auto& item : up.items()) {
      ASSERT_NEAR(percentile_rank(up, item.id), 100.0 - percentile_rank(down, item.id), 1e-12);
    }
  }
}

TEST(FocalProperty, PermutationInvariant) {
  std::mt19937_64 gen(47);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    const auto n = testing::uniform_index(gen, 4, 25);
    auto rows = testing::random_walks(gen, n, 10);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(testing::item_name(i));
    FocalCriteria c{std::uniform_real_distribution<double>(5, 95)(gen), 2, 3.0, std::nullopt};
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::vector<double>> prow;
    std::vector<std::string> pids;
    for (auto p : perm) prow.push_back(rows[p]), pids.push_back(ids[p]);
    std::vector<std::string> a, b;
    try {
      a = select_focal_items(make_dataset(rows, ids), c);
    } catch (const Error&) {
      EXPECT_THROW(select_focal_items(make_dataset(prow, pids), c), Error);
      continue;
    }
    b = select_focal_items(make_dataset(prow, pids), c);
    ASSERT_EQ(a, b);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(SmoothnessProperty, AtLeastOneWithNetChange) {
  std::mt19937_64 gen(53);
  for (int round = 0; round < 1000; ++round) {
    auto row = testing::random_rows(gen, 1, testing::uniform_index(gen, 3, 30))[0];
    if (row.back() == row.front()) continue;
    ASSERT_GE(smoothness(row), 1.0 - 1e-12);
  }
}

}  // namespace
}  // namespace guardrail
