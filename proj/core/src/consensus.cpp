#include "guardrail/consensus.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace guardrail {

std::vector<ConsensusEntry> rank_candidates(const std::vector<PeerCandidateList>& lists) {
  struct Tally {
    int votes = 0;
    double rank_sum = 0.0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& list : lists) {
    std::set<std::string> seen;
    for (std::size_t pos = 0; pos < list.entities.size(); ++pos) {
      const auto& id = list.entities[pos];
      if (!seen.insert(id).second) continue;
      auto& t = tallies[id];
      ++t.votes;
      t.rank_sum += static_cast<double>(pos + 1);
    }
  }
  std::vector<ConsensusEntry> out;
  out.reserve(tallies.size());
  for (const auto& [id, t] : tallies) {
    out.push_back({id, t.votes, t.rank_sum / t.votes});
  }
  std::stable_sort(out.begin(), out.end(), [](const ConsensusEntry& a, const ConsensusEntry& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
    return a.id < b.id;
  });
  return out;
}

std::vector<ConsensusEntry> consensus_filter(const std::vector<PeerCandidateList>& lists,
                                             int threshold) {
  auto ranked = rank_candidates(lists);
  std::erase_if(ranked, [threshold](const ConsensusEntry& e) { return e.votes < threshold; });
  return ranked;
}

}  // namespace guardrail
