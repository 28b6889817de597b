#include "guardrail/peers.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <spdlog/spdlog.h>

#include "guardrail/error.hpp"

namespace guardrail {

std::string_view to_string(PeerSource s) {
  return s == PeerSource::static_map ? "static" : "external";
}

PeerCandidateList make_candidate_list(std::string focal_id, const std::vector<std::string>& entities,
                                      PeerSource source, std::optional<std::string> raw_response) {
  PeerCandidateList list{std::move(focal_id), {}, source, std::move(raw_response)};
  std::set<std::string> seen;
  for (const auto& e : entities) {
    if (e == list.focal_id || !seen.insert(e).second) continue;
    list.entities.push_back(e);
  }
  return list;
}

void PeerProviderConfig::check() const {
  if (mode == ProviderMode::external && !endpoint) {
    fail(ErrorKind::invalid_argument, "external peer provider requires an endpoint");
  }
  if (mode == ProviderMode::static_map && !static_map_path) {
    fail(ErrorKind::invalid_argument, "static peer provider requires static_map_path");
  }
  if (samples < 1) fail(ErrorKind::invalid_argument, "samples must be >= 1");
  if (retry.max_attempts < 1) fail(ErrorKind::invalid_argument, "retry.max_attempts must be >= 1");
  if (timeout.count() <= 0) fail(ErrorKind::invalid_argument, "timeout must be positive");
}

PeerProviderConfig provider_config_from_json(const Json& j) {
  try {
    PeerProviderConfig c;
    const auto mode = j.value("mode", std::string("static"));
    if (mode == "static") {
      c.mode = ProviderMode::static_map;
    } else if (mode == "external") {
      c.mode = ProviderMode::external;
    } else {
      fail(ErrorKind::invalid_input, "unknown provider mode '" + mode + "'");
    }
    if (j.contains("static_map_path")) c.static_map_path = j.at("static_map_path").get<std::string>();
    if (j.contains("endpoint")) c.endpoint = j.at("endpoint").get<std::string>();
    c.prompt_template_id = j.value("prompt_template_id", c.prompt_template_id);
    c.samples = j.value("samples", c.samples);
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
    if (j.contains("retry")) {
      c.retry.max_attempts = j.at("retry").value("max_attempts", c.retry.max_attempts);
      c.retry.backoff =
          std::chrono::milliseconds(j.at("retry").value("backoff_ms", c.retry.backoff.count()));
    }
    if (j.contains("alias_paths")) c.alias_paths = j.at("alias_paths").get<std::vector<std::string>>();
    c.max_entities = j.value("max_entities", c.max_entities);
    c.check();
    return c;
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed provider config: ") + e.what());
  }
}

StaticPeerMap static_map_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::invalid_input, "static peer map must be a JSON object");
  StaticPeerMap map;
  for (const auto& [focal, peers] : j.items()) {
    auto ids = peers.get<std::vector<std::string>>();
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (id == focal) fail(ErrorKind::invalid_input, "static peers of '" + focal + "' include itself");
      if (!seen.insert(id).second) {
        fail(ErrorKind::invalid_input, "static peers of '" + focal + "' repeat '" + id + "'");
      }
    }
    map.emplace(focal, std::move(ids));
  }
  return map;
}

StaticPeerMap load_static_map(const std::string& path) {
  return static_map_from_json(read_json_file(path));
}

std::vector<PeerCandidateList> static_peers(const StaticPeerMap& map, const std::string& focal_id,
                                            int m) {
  if (m < 1) fail(ErrorKind::invalid_argument, "m must be >= 1");
  auto it = map.find(focal_id);
  if (it == map.end()) {
    std::string known;
    for (const auto& [k, v] : map) known += (known.empty() ? "" : ", ") + k;
    fail(ErrorKind::not_found,
         "no static peers for '" + focal_id + "' (known: " + known + ")");
  }
  return std::vector<PeerCandidateList>(
      static_cast<std::size_t>(m),
      make_candidate_list(focal_id, it->second, PeerSource::static_map));
}

std::vector<PeerCandidateList> static_peers(const PeerProviderConfig& config,
                                            const std::string& focal_id, int m) {
  if (!config.static_map_path) {
    fail(ErrorKind::invalid_argument, "static peer provider requires static_map_path");
  }
  return static_peers(load_static_map(*config.static_map_path), focal_id, m);
}

// --- prompts ----------------------------------------------------------------

namespace {

const std::vector<PromptTemplate>& templates() {
  static const std::vector<PromptTemplate> all = {
      {"covid", "country",
       "You are curating contextual comparisons for a public data-exploration platform that "
       "visualizes COVID-19 cumulative cases per million. The goal is to help people make better "
       "sense of charts, surface missing context, and ultimately support better decisions and a "
       "more holistic understanding of the metric. For each highlighted country, select five "
       "other countries as meaningful comparisons to co-plot as auxiliary lines. Consider "
       "geographic proximity (e.g., immediate neighbors), similar stages of economic development, "
       "comparable demographics and urbanization, and health-system capacity. Avoid random picks, "
       "duplicates, and microstates unless the anchor is one; relax constraints only as needed, "
       "and break ties by geographic proximity, then alphabetically."},
      {"stocks", "stock",
       "You are curating contextual comparisons for a public data-exploration platform that "
       "visualizes S&P 500 stock price performance (percentage change). The goal is to help "
       "people make better sense of charts, surface missing context, and ultimately support "
       "better decisions and a more holistic understanding of the metric. For each highlighted "
       "stock, select five other stocks as meaningful comparisons to co-plot as auxiliary lines. "
       "Consider industry proximity (e.g., same or adjacent GICS industry or sub-industry), "
       "similar market capitalization, comparable growth/volatility profiles, and operating "
       "capacity. Avoid random picks, duplicates, and non-S&P 500 stocks; relax constraints only "
       "as needed, and break ties by industry proximity, then alphabetically by ticker."},
  };
  return all;
}

std::string_view trim_token(std::string_view s) {
  auto junk = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '"' || c == '\'' ||
           c == '`' || c == '.' || c == ':' || c == '_';
  };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  return s;
}

// Drops "1.", "2)", "-", "•" style list markers and a leading "and ".
std::string_view strip_marker(std::string_view s) {
  s = trim_token(s);
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) s.remove_prefix(i + 1);
  if (s.starts_with("- ") || s.starts_with("\xE2\x80\xA2")) {
    s.remove_prefix(s.starts_with("- ") ? 2 : 3);
  }
  s = trim_token(s);
  if (s.size() > 4 && (s.starts_with("and ") || s.starts_with("And "))) s.remove_prefix(4);
  return trim_token(s);
}

std::optional<std::string> resolve(std::string_view token, const AliasTable& aliases) {
  if (auto id = aliases.normalize(token)) return id;
  // "Cencora (COR)" or "COR (Cencora)"
  auto open = token.find('(');
  auto close = token.rfind(')');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    if (auto id = aliases.normalize(token.substr(open + 1, close - open - 1))) return id;
    if (auto id = aliases.normalize(trim_token(token.substr(0, open)))) return id;
  }
  // "Italy - neighbor" style annotations.
  for (std::string_view sep : {" - ", " \xE2\x80\x93 ", " \xE2\x80\x94 ", ": "}) {
    auto pos = token.find(sep);
    if (pos != std::string_view::npos) {
      if (auto id = aliases.normalize(trim_token(token.substr(0, pos)))) return id;
    }
  }
  return std::nullopt;
}

}  // namespace

const PromptTemplate& prompt_template(std::string_view id) {
  for (const auto& t : templates()) {
    if (t.id == id) return t;
  }
  fail(ErrorKind::not_found, "unknown prompt template '" + std::string(id) + "'");
}

std::vector<std::string> prompt_template_ids() {
  std::vector<std::string> ids;
  for (const auto& t : templates()) ids.push_back(t.id);
  return ids;
}

std::string render_prompt(const PromptTemplate& tpl, std::string_view focal_id,
                          std::string_view focal_name, std::string_view task_context,
                          std::size_t count) {
  std::string out = tpl.text;
  out += "\n\nHighlighted " + tpl.entity_noun + ": " + std::string(focal_name);
  if (focal_name != focal_id) out += " (" + std::string(focal_id) + ")";
  if (!task_context.empty()) out += "\nTask context: " + std::string(task_context);
  out += "\nAnswer with exactly " + std::to_string(count) + " " + tpl.entity_noun +
         " names separated by commas, most appropriate first, and nothing else.";
  return out;
}

ParsedResponse parse_peer_response(std::string_view text, const AliasTable& aliases,
                                   std::string_view focal_id, std::size_t max_entities) {
  ParsedResponse out;
  std::set<std::string> seen;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ',' && text[i] != ';' && text[i] != '\n' && text[i] != '\r') {
      continue;
    }
    auto token = strip_marker(text.substr(start, i - start));
    start = i + 1;
    if (token.empty()) continue;
    auto id = resolve(token, aliases);
    if (!id) {
      out.unknown.emplace_back(token);
      continue;
    }
    if (*id == focal_id || !seen.insert(*id).second) continue;
    if (out.ids.size() < max_entities) {
      out.ids.push_back(*id);
    } else {
      out.truncated.push_back(*id);
    }
  }
  return out;
}

// --- transcripts ------------------------------------------------------------

Json to_json(const std::vector<TranscriptEntry>& transcript) {
  Json arr = Json::array();
  for (const auto& e : transcript) {
    Json j = {{"request_index", e.request_index},
              {"prompt", e.prompt},
              {"raw_response", e.raw_response ? Json(*e.raw_response) : Json(nullptr)},
              {"parsed_ids", e.parsed_ids}};
    if (!e.error.empty()) j["error"] = e.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<TranscriptEntry> transcript_from_json(const Json& j) {
  try {
    std::vector<TranscriptEntry> out;
    for (const auto& e : j) {
      TranscriptEntry t;
      t.request_index = e.at("request_index").get<int>();
      t.prompt = e.value("prompt", "");
      if (e.contains("raw_response") && !e.at("raw_response").is_null()) {
        t.raw_response = e.at("raw_response").get<std::string>();
      }
      if (e.contains("parsed_ids")) t.parsed_ids = e.at("parsed_ids").get<std::vector<std::string>>();
      t.error = e.value("error", "");
      out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.request_index < b.request_index;
    });
    return out;
  } catch (const Json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("malformed transcript: ") + e.what());
  }
}

std::vector<PeerCandidateList> replay_transcript(const std::vector<TranscriptEntry>& transcript,
                                                 const AliasTable& aliases,
                                                 const std::string& focal_id,
                                                 std::size_t max_entities) {
  std::vector<PeerCandidateList> lists;
  for (const auto& e : transcript) {
    if (!e.raw_response) continue;
    auto parsed = parse_peer_response(*e.raw_response, aliases, focal_id, max_entities);
    if (parsed.ids.empty()) continue;
    lists.push_back(make_candidate_list(focal_id, parsed.ids, PeerSource::external, e.raw_response));
  }
  return lists;
}

// --- providers --------------------------------------------------------------

std::vector<PeerCandidateList> StaticPeerProvider::sample(const std::string& focal_id,
                                                          std::string_view, int m) const {
  return static_peers(map_, focal_id, m);
}

ExternalPeerProvider::ExternalPeerProvider(PeerProviderConfig config, AliasTable aliases)
    : config_(std::move(config)), aliases_(std::move(aliases)) {
  if (config_.mode != ProviderMode::external) {
    fail(ErrorKind::invalid_argument, "ExternalPeerProvider needs mode=external");
  }
  config_.check();
}

std::vector<PeerCandidateList> ExternalPeerProvider::sample(const std::string& focal_id,
                                                            std::string_view task_context,
                                                            int m) const {
  return external_peers_with_transcript(config_, aliases_, focal_id,
                                        aliases_.display_name(focal_id), task_context, m)
      .lists;
}

std::vector<PeerCandidateList> TranscriptPeerProvider::sample(const std::string& focal_id,
                                                              std::string_view, int m) const {
  auto lists = replay_transcript(transcript_, aliases_, focal_id, max_);
  if (m >= 0 && lists.size() > static_cast<std::size_t>(m)) lists.resize(static_cast<std::size_t>(m));
  return lists;
}

}  // namespace guardrail
