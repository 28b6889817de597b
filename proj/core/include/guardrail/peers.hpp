#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardrail/canonical.hpp"

namespace guardrail {

enum class PeerSource { static_map, external };

std::string_view to_string(PeerSource s);

// One sampled list of proposed peers. Entities are normalized ids, pairwise
// distinct, and never include the focal item.
struct PeerCandidateList {
  std::string focal_id;
  std::vector<std::string> entities;
  PeerSource source = PeerSource::static_map;
  std::optional<std::string> raw_response;
};

// Builds a list that honors the invariants: duplicates after the first
// occurrence and the focal id are dropped.
PeerCandidateList make_candidate_list(std::string focal_id, const std::vector<std::string>& entities,
                                      PeerSource source,
                                      std::optional<std::string> raw_response = std::nullopt);

// Maps prose names (country names, company names) and codes to dataset ids.
// File format: {"ITA": ["Italy", "Italian Republic"], ...}; the first alias is
// the display name. Lookup is case-insensitive and ignores surrounding space.
class AliasTable {
 public:
  AliasTable() = default;
  static AliasTable from_json(const Json& j);
  static AliasTable load(const std::vector<std::string>& paths);

  void merge(const AliasTable& other);
  std::optional<std::string> normalize(std::string_view name) const;
  std::string display_name(std::string_view id) const;
  std::size_t size() const { return display_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> lookup_;   // folded alias -> id
  std::map<std::string, std::string, std::less<>> display_;  // id -> display name
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};
};

enum class ProviderMode { static_map, external };

struct PeerProviderConfig {
  ProviderMode mode = ProviderMode::static_map;
  std::optional<std::string> static_map_path;
  std::optional<std::string> endpoint;        // http(s)://host[:port]/path
  std::string prompt_template_id = "covid";
  int samples = 10;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;
  std::vector<std::string> alias_paths;
  std::size_t max_entities = 5;

  // external requires endpoint, static requires static_map_path.
  void check() const;
};

PeerProviderConfig provider_config_from_json(const Json& j);

using StaticPeerMap = std::map<std::string, std::vector<std::string>>;

// {focal_id: [peer_id, ...]}. Rejects maps whose lists contain the focal or
// duplicates.
StaticPeerMap load_static_map(const std::string& path);
StaticPeerMap static_map_from_json(const Json& j);

// m identical copies of the mapped list. Throws Error(not_found) listing the
// known keys for an unknown focal.
std::vector<PeerCandidateList> static_peers(const PeerProviderConfig& config,
                                            const std::string& focal_id, int m);
std::vector<PeerCandidateList> static_peers(const StaticPeerMap& map, const std::string& focal_id,
                                            int m);

// --- prompts and response parsing -------------------------------------------

struct PromptTemplate {
  std::string id;
  std::string entity_noun;  // "country", "stock"
  std::string text;
};

const PromptTemplate& prompt_template(std::string_view id);
std::vector<std::string> prompt_template_ids();

std::string render_prompt(const PromptTemplate& tpl, std::string_view focal_id,
                          std::string_view focal_name, std::string_view task_context,
                          std::size_t count = 5);

struct ParsedResponse {
  std::vector<std::string> ids;
  std::vector<std::string> unknown;   // tokens with no alias match
  std::vector<std::string> truncated; // ids dropped past max_entities
};

// Accepts comma, semicolon, newline and numbered/bulleted lists. Unknown
// names are dropped; the result keeps at most `max_entities` ids in order.
ParsedResponse parse_peer_response(std::string_view text, const AliasTable& aliases,
                                   std::string_view focal_id, std::size_t max_entities = 5);

// --- transcripts ------------------------------------------------------------

struct TranscriptEntry {
  int request_index = 0;
  std::string prompt;
  std::optional<std::string> raw_response;  // nullopt when the request failed
  std::vector<std::string> parsed_ids;
  std::string error;
};

Json to_json(const std::vector<TranscriptEntry>& transcript);
std::vector<TranscriptEntry> transcript_from_json(const Json& j);

// Re-parses recorded raw responses; requests that failed are skipped.
std::vector<PeerCandidateList> replay_transcript(const std::vector<TranscriptEntry>& transcript,
                                                 const AliasTable& aliases,
                                                 const std::string& focal_id,
                                                 std::size_t max_entities = 5);

// --- external endpoint ------------------------------------------------------

struct ExternalResult {
  std::vector<PeerCandidateList> lists;  // successful requests, by request index
  std::vector<TranscriptEntry> transcript;
};

// Issues m concurrent POST {prompt} requests and parses each {text} reply.
// Throws Error(provider) with transcripts attached when fewer than ceil(m/2)
// lists parse. A request never takes longer than timeout * max_attempts.
ExternalResult external_peers_with_transcript(const PeerProviderConfig& config,
                                              const AliasTable& aliases,
                                              const std::string& focal_id,
                                              std::string_view focal_name,
                                              std::string_view task_context, int m);

std::vector<PeerCandidateList> external_peers(const PeerProviderConfig& config,
                                              const std::string& focal_id,
                                              std::string_view task_context, int m);

// --- provider interface used by the semantic strategy -----------------------

class PeerProvider {
 public:
  virtual ~PeerProvider() = default;
  virtual std::vector<PeerCandidateList> sample(const std::string& focal_id,
                                                std::string_view task_context, int m) const = 0;
};

class StaticPeerProvider final : public PeerProvider {
 public:
  explicit StaticPeerProvider(StaticPeerMap map) : map_(std::move(map)) {}
  static StaticPeerProvider load(const std::string& path) {
    return StaticPeerProvider(load_static_map(path));
  }

  std::vector<PeerCandidateList> sample(const std::string& focal_id, std::string_view task_context,
                                        int m) const override;
  const StaticPeerMap& map() const { return map_; }

 private:
  StaticPeerMap map_;
};

class ExternalPeerProvider final : public PeerProvider {
 public:
  ExternalPeerProvider(PeerProviderConfig config, AliasTable aliases);

  std::vector<PeerCandidateList> sample(const std::string& focal_id, std::string_view task_context,
                                        int m) const override;

 private:
  PeerProviderConfig config_;
  AliasTable aliases_;
};

// Replays a recorded transcript, ignoring m beyond the recorded requests.
class TranscriptPeerProvider final : public PeerProvider {
 public:
  TranscriptPeerProvider(std::vector<TranscriptEntry> transcript, AliasTable aliases,
                         std::size_t max_entities = 5)
      : transcript_(std::move(transcript)), aliases_(std::move(aliases)), max_(max_entities) {}

  std::vector<PeerCandidateList> sample(const std::string& focal_id, std::string_view task_context,
                                        int m) const override;

 private:
  std::vector<TranscriptEntry> transcript_;
  AliasTable aliases_;
  std::size_t max_;
};

}  // namespace guardrail
