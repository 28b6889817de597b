#pragma once

#include <string>
#include <vector>

#include "guardrail/peers.hpp"

namespace guardrail {

struct ConsensusEntry {
  std::string id;
  int votes = 0;           // number of lists containing the id
  double mean_rank = 0.0;  // mean 1-based position over those lists
};

// Every entity seen, ranked by votes descending, then mean rank ascending,
// then id ascending.
std::vector<ConsensusEntry> rank_candidates(const std::vector<PeerCandidateList>& lists);

// Majority-vote filter: the ranked entities with votes >= threshold. Votes
// count list membership, not repetitions within a list.
std::vector<ConsensusEntry> consensus_filter(const std::vector<PeerCandidateList>& lists,
                                             int threshold);

}  // namespace guardrail
