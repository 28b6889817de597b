#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "guardrail/consensus.hpp"
#include "guardrail/error.hpp"
#include "guardrail/kmeans.hpp"
#include "guardrail/percentile.hpp"
#include "guardrail/random.hpp"
#include "guardrail/strategies.hpp"

namespace guardrail {
namespace {

using testing::make_dataset;

StrategySpec spec_of(StrategyKind kind) { return default_spec(kind); }

std::vector<std::string> ids_of(const GuardrailSet& set) {
  std::vector<std::string> out;
  for (const auto& c : set.context) out.push_back(c.item_id.value_or(""));
  return out;
}

// Independent oracle: sort the column and interpolate.
double oracle_percentile(std::vector<double> col, double p) {
  std::sort(col.begin(), col.end());
  const double h = (static_cast<double>(col.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, col.size() - 1);
  return col[lo] + (h - static_cast<double>(lo)) * (col[hi] - col[lo]);
}

TEST(Defaults, SpecMatchesStudyParameters) {
  StrategySpec s;
  EXPECT_EQ(s.n, 5u);
  EXPECT_EQ(s.percentiles, (std::vector<double>{5, 25, 50, 75, 95}));
  EXPECT_EQ(s.cluster_count(), 5u);
  EXPECT_EQ(s.consensus.samples, 10);
  EXPECT_EQ(s.consensus.threshold, 7);
}

TEST(StrategySpec, RejectsInvalidParameters) {
  StrategySpec s;
  s.percentiles = {50, 25};
  EXPECT_THROW(s.check(), Error);
  s.percentiles = {25, 25};
  EXPECT_THROW(s.check(), Error);
  s.percentiles = {0, 50};
  EXPECT_THROW(s.check(), Error);
  s = {};
  s.consensus = {10, 11};
  EXPECT_THROW(s.check(), Error);
  s.consensus = {10, 0};
  EXPECT_THROW(s.check(), Error);
  s = {};
  s.n = 0;
  EXPECT_THROW(s.check(), Error);
}

TEST(StrategySpec, JsonRoundTrip) {
  StrategySpec s = spec_of(StrategyKind::cluster_representatives);
  s.k = 3;
  s.seed = 18446744073709551615ULL;
  auto back = strategy_spec_from_json(Json::parse(canonical_dump(to_json(s))));
  EXPECT_EQ(back.kind, s.kind);
  EXPECT_EQ(back.k, s.k);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.percentiles, s.percentiles);
}

TEST(Random, SixItemsGiveTheOtherFive) {
  auto ds = make_dataset(std::vector<std::vector<double>>(6, {1.0, 2.0}));
  auto set = random_exemplars(ds, "I02", spec_of(StrategyKind::random));
  auto ids = ids_of(set);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<std::string>{"I00", "I01", "I03", "I04", "I05"}));
  EXPECT_EQ(set.provenance[0]["seed"], default_seed("test", "I02"));
}

TEST(Random, DeterministicPerSeed) {
  std::mt19937_64 gen(3);
  auto ds = make_dataset(testing::random_rows(gen, 40, 4));
  auto spec = spec_of(StrategyKind::random);
  spec.seed = 99;
  EXPECT_EQ(canonical_dump(to_json(random_exemplars(ds, "I00", spec))),
            canonical_dump(to_json(random_exemplars(ds, "I00", spec))));
  spec.seed = 100;
  auto other = random_exemplars(ds, "I00", spec);
  spec.seed = 99;
  EXPECT_NE(ids_of(other), ids_of(random_exemplars(ds, "I00", spec)));
}

TEST(Random, TooManyRequested) {
  auto ds = make_dataset(std::vector<std::vector<double>>(5, {1.0}));
  EXPECT_THROW(random_exemplars(ds, "I00", spec_of(StrategyKind::random)), Error);
}

// Chi-square over 10,000 seeds: every non-focal item should be drawn about
// n/(N-1) of the time. 499 dof; the 0.999 quantile is about 600.
TEST(Random, MembershipIsUniformAcrossSeeds) {
  const std::size_t items = 500;
  auto ds = make_dataset(std::vector<std::vector<double>>(items, {0.0, 1.0}));
  std::map<std::string, int> counts;
  auto spec = spec_of(StrategyKind::random);
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    spec.seed = static_cast<std::uint64_t>(s) * 0x9E3779B97F4A7C15ULL + 1;
    for (const auto& id : ids_of(random_exemplars(ds, "I00", spec))) ++counts[id];
  }
  EXPECT_EQ(counts.count("I00"), 0u);
  const double expected = seeds * 5.0 / (items - 1);
  double chi2 = 0.0;
  for (std::size_t i = 1; i < items; ++i) {
    const double o = counts[testing::item_name(i)];
    chi2 += (o - expected) * (o - expected) / expected;
  }
  EXPECT_LT(chi2, 600.0);
  EXPECT_GT(chi2, 400.0);  // suspiciously perfect draws would also be a bug
}

TEST(Rng, BoundedDrawsAreUnbiased) {
  Rng rng(5);
  std::vector<int> c(3, 0);
  for (int i = 0; i < 30000; ++i) ++c[rng.below(3)];
  for (int v : c) EXPECT_NEAR(v, 10000, 400);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Percentiles, ConstantSeriesGiveConstantLines) {
  auto ds = make_dataset(std::vector<std::vector<double>>(7, {3.5, 3.5, 3.5}));
  auto set = percentile_markers(ds, spec_of(StrategyKind::percentile_markers));
  for (const auto& c : set.context) EXPECT_EQ(c.values, (std::vector<double>{3.5, 3.5, 3.5}));
}

TEST(Percentiles, OneToHundredMedian) {
  std::vector<std::vector<double>> rows;
  for (int v = 100; v >= 1; --v) rows.push_back({double(v), double(v)});
  auto ds = make_dataset(rows);
  auto set = percentile_markers(ds, spec_of(StrategyKind::percentile_markers));
  ASSERT_EQ(set.context.size(), 5u);
  EXPECT_EQ(set.context[2].label, "p50");
  EXPECT_EQ(set.context[2].values[0], 50.5);
  EXPECT_DOUBLE_EQ(set.context[0].values[0], 5.95);
  EXPECT_TRUE(set.context[0].is_synthetic);
  EXPECT_EQ(set.context[0].percentile_tag, 5.0);
}

TEST(Percentiles, MarkerCountFollowsPercentileList) {
  auto ds = make_dataset(std::vector<std::vector<double>>(4, {1.0}));
  auto spec = spec_of(StrategyKind::percentile_markers);
  spec.percentiles = {10, 90, 99};
  EXPECT_EQ(percentile_markers(ds, spec).context.size(), 3u);
  EXPECT_THROW(percentile_markers(make_dataset({{1.0}}), spec), Error);
}

TEST(Percentiles, MatchSortOracleOnRandomMatrices) {
  std::mt19937_64 gen(21);
  const std::vector<double> ps{0.5, 5, 25, 33.3, 50, 75, 95, 99.9};
  for (int round = 0; round < 200; ++round) {
    const auto n = testing::uniform_index(gen, 2, 50), steps = testing::uniform_index(gen, 1, 30);
    auto rows = testing::random_rows(gen, n, steps, -1e3, 1e3);
    auto lines = percentile_lines(make_dataset(rows), ps);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> col;
        for (const auto& r : rows) col.push_back(r[t]);
        const double want = oracle_percentile(col, ps[p]);
        ASSERT_LE(std::abs(lines[p][t] - want), 1e-9 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(PercentileExemplars, FlatBandsMatchThemselves) {
  std::vector<std::vector<double>> rows{{50, 50}, {5, 5}, {25, 25}, {50, 50}, {75, 75}, {95, 95}};
  std::vector<std::string> ids{"FOCAL", "P05", "P25", "P50", "P75", "P95"};
  auto ds = make_dataset(rows, ids);
  auto set = percentile_exemplars(ds, "FOCAL", spec_of(StrategyKind::percentile_exemplars));
  // Lines are computed with the focal included, so they sit near but not
  // exactly on the flat values; each band still claims its own item.
  EXPECT_EQ(ids_of(set), (std::vector<std::string>{"P05", "P25", "P50", "P75", "P95"}));
  EXPECT_EQ(set.context[1].label, "Item P25 (p25)");
  EXPECT_EQ(set.context[1].percentile_tag, 25.0);
  EXPECT_FALSE(set.context[1].is_synthetic);
}

TEST(PercentileExemplars, SingleLineThreeItems) {
  auto ds = make_dataset({{0, 0, 0}, {1, 2, 3}, {10, 10, 10}});
  auto spec = spec_of(StrategyKind::percentile_exemplars);
  spec.percentiles = {50};
  // Median line is I01's series (the middle value at each t). Candidates
  // are I00 (SSE 14) and I02 (SSE 81+64+49=194).
  auto set = percentile_exemplars(ds, "I01", spec);
  EXPECT_EQ(ids_of(set), std::vector<std::string>{"I00"});
  EXPECT_EQ(set.provenance[0]["sse"], 14.0);
}

TEST(PercentileExemplars, IdenticalSeriesTieBreakOnId) {
  auto ds = make_dataset({{1, 1}, {5, 5}, {5, 5}, {9, 9}}, {"F", "ZED", "ABE", "Q"});
  auto spec = spec_of(StrategyKind::percentile_exemplars);
  spec.percentiles = {50};
  EXPECT_EQ(ids_of(percentile_exemplars(ds, "F", spec)), std::vector<std::string>{"ABE"});
}

TEST(PercentileExemplars, TooFewCandidates) {
  auto ds = make_dataset(std::vector<std::vector<double>>(5, {1.0}));
  EXPECT_THROW(percentile_exemplars(ds, "I00", spec_of(StrategyKind::percentile_exemplars)), Error);
}

TEST(KMeans, SaturatedKHasZeroInertia) {
  std::mt19937_64 gen(2);
  auto rows = testing::random_rows(gen, 6, 3);
  auto r = kmeans_timeseries(rows, 6, 1);
  EXPECT_EQ(r.inertia, 0.0);
  std::set<std::size_t> distinct(r.assignments.begin(), r.assignments.end());
  EXPECT_EQ(distinct.size(), 6u);
  EXPECT_THROW(kmeans_timeseries(rows, 7, 1), Error);
  EXPECT_THROW(kmeans_timeseries(rows, 0, 1), Error);
}

TEST(KMeans, SeparatedGroupsRecovered) {
  std::vector<std::vector<double>> rows{{0, 0}, {0, 0}, {0, 0}, {100, 100}, {100, 100}};
  auto r = kmeans_timeseries(rows, 2, 42);
  EXPECT_EQ(r.assignments[0], r.assignments[2]);
  EXPECT_NE(r.assignments[0], r.assignments[3]);
  EXPECT_EQ(r.centroids[r.assignments[3]], (std::vector<double>{100, 100}));
  EXPECT_EQ(r.inertia, 0.0);
}

TEST(KMeans, MoreClustersThanDistinctPointsStaysNonEmpty) {
  std::vector<std::vector<double>> rows{{1}, {1}, {1}, {2}};
  auto r = kmeans_timeseries(rows, 3, 9);
  std::set<std::size_t> used(r.assignments.begin(), r.assignments.end());
  EXPECT_EQ(used.size(), 3u);
}

TEST(KMeans, Deterministic) {
  std::mt19937_64 gen(4);
  auto rows = testing::random_walks(gen, 30, 12);
  auto a = kmeans_timeseries(rows, 4, 77), b = kmeans_timeseries(rows, 4, 77);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.inertia, b.inertia);
}

TEST(PercentileExemplars, NearTiesGoToLowerIdAtAnyScale) {
  // Four items: the median line sits exactly between I01 and I02.
  for (double scale : {1.0, 0.1, 3.7, 1e-3, 1e5}) {
    std::vector<std::vector<double>> rows{{0, 0.3}, {0.1, 0.7}, {0.2, 1.1}, {0.3, 1.3}};
    for (auto& r : rows) {
      for (auto& v : r) v *= scale;
    }
    auto spec = spec_of(StrategyKind::percentile_exemplars);
    spec.percentiles = {50};
    auto set = percentile_exemplars(make_dataset(rows), "I00", spec);
    EXPECT_EQ(ids_of(set), (std::vector<std::string>{"I01"})) << "scale " << scale;
  }
}

TEST(ClusterRepresentatives, EquidistantMembersGoToLowerIdAtAnyScale) {
  for (double scale : {1.0, 0.1, 3.7, 1e-3, 1e5}) {
    std::vector<std::vector<double>> rows{{100, 100}, {0.1, 0.3}, {0.3, 0.1}, {101, 99}};
    for (auto& r : rows) {
      for (auto& v : r) v *= scale;
    }
    auto spec = spec_of(StrategyKind::cluster_representatives);
    spec.n = 2;
    auto ids = ids_of(cluster_representatives(make_dataset(rows), "I00", spec));
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, (std::vector<std::string>{"I01", "I03"})) << "scale " << scale;
  }
}

TEST(ClusterRepresentatives, DuplicateGroupsGiveZeroDistance) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> ids;
  for (int g = 0; g < 5; ++g) {
    for (int c = 0; c < 3; ++c) {
      rows.push_back({g * 100.0, g * 100.0 + 1, g * 100.0 + 2});
      ids.push_back("G" + std::to_string(g) + "_" + std::to_string(c));
    }
  }
  rows.push_back({0.0, 1.0, 2.0});
  ids.push_back("FOCAL");
  auto ds = make_dataset(rows, ids);
  auto set = cluster_representatives(ds, "FOCAL", spec_of(StrategyKind::cluster_representatives));
  std::set<char> groups;
  for (std::size_t i = 0; i < set.context.size(); ++i) {
    EXPECT_EQ(set.provenance[i]["distance_to_centroid"], 0.0);
    groups.insert(set.context[i].item_id->at(1));
    EXPECT_EQ(set.context[i].item_id->substr(2), "_0");  // id tie-break inside a group
  }
  EXPECT_EQ(groups.size(), 5u);
}

TEST(ClusterRepresentatives, LoneFocalClusterBorrowsNearestItem) {
  std::vector<std::vector<double>> rows{{1000, 1000}, {0, 0}, {0, 1}, {50, 50}, {51, 50}};
  auto ds = make_dataset(rows, {"FOCAL", "A", "B", "C", "D"});
  auto spec = spec_of(StrategyKind::cluster_representatives);
  spec.n = 3;
  auto set = cluster_representatives(ds, "FOCAL", spec);
  auto ids = ids_of(set);
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 3u);
  int substitutes = 0;
  for (const auto& p : set.provenance) substitutes += p["substitute"].get<bool>();
  EXPECT_EQ(substitutes, 1);
}

TEST(ClusterRepresentatives, RisingAndFallingCohortsBothSurface) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> noise(0, 1);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 30; ++i) {
    const double slope = i < 15 ? 3.0 : -3.0;
    std::vector<double> r;
    for (int t = 0; t < 20; ++t) r.push_back(slope * t + noise(gen));
    rows.push_back(r);
  }
  auto ds = make_dataset(rows);
  auto set = cluster_representatives(ds, "I00", spec_of(StrategyKind::cluster_representatives));
  bool up = false, down = false;
  for (const auto& c : set.context) (c.values.back() > 0 ? up : down) = true;
  EXPECT_TRUE(up && down);
}

class FixedProvider : public PeerProvider {
 public:
  explicit FixedProvider(std::vector<std::vector<std::string>> lists) : lists_(std::move(lists)) {}
  std::vector<PeerCandidateList> sample(const std::string& focal, std::string_view, int m) const override {
    std::vector<PeerCandidateList> out;
    for (int i = 0; i < m; ++i) {
      out.push_back(make_candidate_list(focal, lists_[static_cast<std::size_t>(i) % lists_.size()],
                                        PeerSource::external, "raw " + std::to_string(i)));
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> lists_;
};

TEST(Semantic, UnanimousListGetsFullVotes) {
  auto ds = make_dataset(std::vector<std::vector<double>>(8, {1.0, 2.0}));
  FixedProvider p({{"I01", "I02", "I03", "I04", "I05"}});
  auto set = semantic_exemplars(ds, "I00", spec_of(StrategyKind::semantic), p);
  EXPECT_EQ(ids_of(set), (std::vector<std::string>{"I01", "I02", "I03", "I04", "I05"}));
  for (const auto& prov : set.provenance) EXPECT_EQ(prov["votes"], 10);
  EXPECT_EQ((*set.audit)["raw_responses"].size(), 10u);
}

TEST(Semantic, TopsUpBelowThresholdAndRecordsShortfall) {
  auto ds = make_dataset(std::vector<std::vector<double>>(8, {1.0, 2.0}));
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> l{"I01", "I02", "I03"};
    if (i < 6) l.push_back("I04");  // 6 votes
    if (i < 2) l.push_back("I05");
    if (i < 9) l.push_back("NOT_IN_DATA");
    lists.push_back(l);
  }
  FixedProvider p(lists);
  auto set = semantic_exemplars(ds, "I00", spec_of(StrategyKind::semantic), p);
  EXPECT_EQ(ids_of(set), (std::vector<std::string>{"I01", "I02", "I03", "I04", "I05"}));
  EXPECT_EQ(set.provenance[3]["retained"], false);
  EXPECT_EQ(set.provenance[3]["shortfall"], 2);
  EXPECT_EQ((*set.audit)["retained"], 3);
}

TEST(Semantic, NothingRetainedInDatasetIsAnError) {
  auto ds = make_dataset(std::vector<std::vector<double>>(3, {1.0, 2.0}));
  FixedProvider p({{"ELSEWHERE"}});
  EXPECT_THROW(semantic_exemplars(ds, "I00", spec_of(StrategyKind::semantic), p), Error);
}

PeerCandidateList list_of(std::vector<std::string> ids) {
  return make_candidate_list("F", ids, PeerSource::static_map);
}

TEST(Consensus, ThresholdBoundaryAndOrdering) {
  std::vector<PeerCandidateList> lists;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> l;
    if (i < 7) l.push_back("X");
    if (i < 6) l.push_back("Y");
    lists.push_back(list_of(l));
  }
  auto kept = consensus_filter(lists, 7);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].id, "X");
  EXPECT_EQ(kept[0].votes, 7);
}

TEST(Consensus, ThresholdOneIsUnionAndUnanimityIsIntersection) {
  std::vector<PeerCandidateList> lists{list_of({"A", "B"}), list_of({"C", "A"}), list_of({"A", "D"})};
  EXPECT_EQ(consensus_filter(lists, 1).size(), 4u);
  auto all = consensus_filter(lists, 3);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].id, "A");
  // Equal votes: mean rank decides (B at 2, C at 1, D at 2), then id.
  auto ranked = rank_candidates(lists);
  EXPECT_EQ(ranked[1].id, "C");
  EXPECT_EQ(ranked[2].id, "B");
  EXPECT_EQ(ranked[3].id, "D");
}

TEST(Consensus, CandidateListsAreDedupedAndExcludeFocal) {
  auto l = make_candidate_list("F", {"A", "F", "A", "B"}, PeerSource::static_map);
  EXPECT_EQ(l.entities, (std::vector<std::string>{"A", "B"}));
}

TEST(ComputeGuardrails, FocalNeverInContext) {
  std::mt19937_64 gen(31);
  for (int round = 0; round < 50; ++round) {
    const auto n = testing::uniform_index(gen, 7, 25);
    auto ds = make_dataset(testing::random_walks(gen, n, testing::uniform_index(gen, 2, 15)));
    const auto focal = testing::item_name(testing::uniform_index(gen, 0, n - 1));
    std::vector<std::string> peers;
    for (std::size_t i = 0; i < n; ++i) peers.push_back(testing::item_name(i));
    FixedProvider p({peers});
    for (auto kind : all_strategy_kinds()) {
      auto set = compute_guardrails(ds, focal, spec_of(kind), &p);
      EXPECT_EQ(set.focal_id, focal);
      for (const auto& c : set.context) ASSERT_NE(c.item_id.value_or(""), focal);
      auto ids = ids_of(set);
      if (kind != StrategyKind::percentile_markers) {
        ASSERT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
        ASSERT_EQ(ids.size(), 5u);
      }
    }
  }
}

TEST(ComputeGuardrails, UnknownFocalAndMissingProvider) {
  auto ds = make_dataset(std::vector<std::vector<double>>(8, {1.0}));
  try {
    compute_guardrails(ds, "NOPE", spec_of(StrategyKind::random));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
  EXPECT_THROW(compute_guardrails(ds, "I00", spec_of(StrategyKind::semantic)), Error);
}

TEST(GuardrailJson, ShapeIsStable) {
  auto ds = make_dataset({{1, 2}, {3, 4}, {5, 6}});
  auto set = compute_guardrails(ds, "I00", spec_of(StrategyKind::percentile_markers));
  auto j = to_json(set);
  EXPECT_EQ(j["focal_id"], "I00");
  EXPECT_EQ(j["strategy"]["kind"], "percentile_markers");
  EXPECT_EQ(j["context"][0]["label"], "p5");
  EXPECT_EQ(j["context"][0]["is_synthetic"], true);
  EXPECT_EQ(j["provenance"].size(), 5u);
  EXPECT_FALSE(j.contains("audit"));
}

}  // namespace
}  // namespace guardrail
