#include <httplib.h>

#include <future>
#include <thread>

#include <spdlog/spdlog.h>

#include "guardrail/error.hpp"
#include "guardrail/peers.hpp"

namespace guardrail {

namespace {

using Clock = std::chrono::steady_clock;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorKind::invalid_argument, "endpoint must be an http(s) URL: '" + url + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct Attempt {
  std::optional<std::string> text;
  std::string error;
};

Attempt post_with_retries(const PeerProviderConfig& config, const Endpoint& ep,
                          const std::string& prompt) {
  const auto deadline = Clock::now() + config.timeout * config.retry.max_attempts;
  const std::string body = Json{{"prompt", prompt}}.dump();
  std::string last_error;

  for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) break;
    const auto budget = std::min(config.timeout, remaining);

    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(budget);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(budget - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = "attempt " + std::to_string(attempt) + ": " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "attempt " + std::to_string(attempt) + ": HTTP " + std::to_string(res->status);
    } else {
      try {
        auto j = Json::parse(res->body);
        return {j.at("text").get<std::string>(), {}};
      } catch (const Json::exception& e) {
        last_error = "attempt " + std::to_string(attempt) + ": bad response body: " + e.what();
      }
    }
    if (attempt < config.retry.max_attempts) {
      auto wait = config.retry.backoff * attempt;
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left <= wait) break;
      std::this_thread::sleep_for(wait);
    }
  }
  return {std::nullopt, last_error.empty() ? "request deadline exhausted" : last_error};
}

}  // namespace

ExternalResult external_peers_with_transcript(const PeerProviderConfig& config,
                                              const AliasTable& aliases,
                                              const std::string& focal_id,
                                              std::string_view focal_name,
                                              std::string_view task_context, int m) {
  config.check();
  if (!config.endpoint) fail(ErrorKind::invalid_argument, "no endpoint configured");
  if (m < 1) fail(ErrorKind::invalid_argument, "m must be >= 1");
  const auto ep = split_endpoint(*config.endpoint);
  const auto prompt = render_prompt(prompt_template(config.prompt_template_id), focal_id,
                                    focal_name, task_context, config.max_entities);

  std::vector<std::future<Attempt>> pending;
  pending.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    pending.push_back(std::async(std::launch::async,
                                 [&config, &ep, &prompt] { return post_with_retries(config, ep, prompt); }));
  }

  ExternalResult result;
  for (int i = 0; i < m; ++i) {
    auto attempt = pending[static_cast<std::size_t>(i)].get();
    TranscriptEntry entry{i, prompt, attempt.text, {}, attempt.error};
    if (attempt.text) {
      auto parsed = parse_peer_response(*attempt.text, aliases, focal_id, config.max_entities);
      for (const auto& u : parsed.unknown) {
        spdlog::warn("request {}: dropped unrecognized entity '{}'", i, u);
      }
      if (!parsed.truncated.empty()) {
        spdlog::info("request {}: truncated {} entities beyond {}", i, parsed.truncated.size(),
                     config.max_entities);
      }
      entry.parsed_ids = parsed.ids;
      if (!parsed.ids.empty()) {
        result.lists.push_back(
            make_candidate_list(focal_id, parsed.ids, PeerSource::external, attempt.text));
      } else {
        entry.error = "no recognizable entities";
      }
    } else {
      spdlog::warn("request {} failed: {}", i, attempt.error);
    }
    result.transcript.push_back(std::move(entry));
  }

  const auto required = static_cast<std::size_t>((m + 1) / 2);
  if (result.lists.size() < required) {
    fail(ErrorKind::provider, "only " + std::to_string(result.lists.size()) + " of " +
                                  std::to_string(m) + " peer requests parsed (need " +
                                  std::to_string(required) + "); transcript: " +
                                  to_json(result.transcript).dump());
  }
  return result;
}

std::vector<PeerCandidateList> external_peers(const PeerProviderConfig& config,
                                              const std::string& focal_id,
                                              std::string_view task_context, int m) {
  auto aliases = AliasTable::load(config.alias_paths);
  return external_peers_with_transcript(config, aliases, focal_id, aliases.display_name(focal_id),
                                        task_context, m)
      .lists;
}

}  // namespace guardrail
