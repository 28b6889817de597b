#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "guardrail/consensus.hpp"
#include "guardrail/error.hpp"
#include "guardrail/peers.hpp"

namespace guardrail {
namespace {

const std::string kData = GUARDRAIL_TEST_DATA_DIR;

AliasTable bundled_aliases() {
  return AliasTable::load({kData + "/aliases/countries.json", kData + "/aliases/sp500.json"});
}

StaticPeerMap bundled_map() { return load_static_map(kData + "/peers/static_map.json"); }

TEST(Aliases, CaseAndWhitespaceInsensitive) {
  auto a = bundled_aliases();
  EXPECT_EQ(a.normalize("  italy "), "ITA");
  EXPECT_EQ(a.normalize("Russian   Federation"), "RUS");
  EXPECT_EQ(a.normalize("grc"), "GRC");
  EXPECT_EQ(a.normalize("Church & Dwight"), "CHD");
  EXPECT_EQ(a.normalize("at&t"), "T");
  EXPECT_FALSE(a.normalize("Atlantis"));
  EXPECT_EQ(a.display_name("DEU"), "Germany");
  EXPECT_EQ(a.display_name("UNKNOWN"), "UNKNOWN");
}

TEST(Aliases, RejectsMalformedTables) {
  EXPECT_THROW(AliasTable::from_json(Json::array()), Error);
  EXPECT_THROW(AliasTable::from_json(Json{{"X", Json::array()}}), Error);
}

TEST(StaticMap, NorwayReplayedTenTimes) {
  auto lists = static_peers(bundled_map(), "NOR", 10);
  ASSERT_EQ(lists.size(), 10u);
  for (const auto& l : lists) {
    EXPECT_EQ(l.entities, (std::vector<std::string>{"SWE", "DNK", "FIN", "ISL", "NLD"}));
    EXPECT_EQ(l.source, PeerSource::static_map);
  }
  EXPECT_EQ(static_peers(bundled_map(), "TEL", 1).size(), 1u);
  EXPECT_EQ(static_peers(bundled_map(), "TEL", 1)[0].entities,
            (std::vector<std::string>{"APH", "KEYS", "GLW", "HUBB", "ETN"}));
}

TEST(StaticMap, UnknownFocalListsKnownKeys) {
  try {
    static_peers(bundled_map(), "FRA", 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
    EXPECT_NE(std::string(e.what()).find("BLR"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("VZ"), std::string::npos);
  }
}

TEST(StaticMap, RejectsSelfOrDuplicatePeers) {
  EXPECT_THROW(static_map_from_json(Json{{"A", {"B", "A"}}}), Error);
  EXPECT_THROW(static_map_from_json(Json{{"A", {"B", "B"}}}), Error);
}

TEST(StaticMap, ConsensusReproducesPublishedSets) {
  const std::map<std::string, std::vector<std::string>> published{
      {"GRC", {"ITA", "ESP", "PRT", "CYP", "HRV"}}, {"DEU", {"FRA", "NLD", "AUT", "SWE", "DNK"}},
      {"BLR", {"RUS", "UKR", "KAZ", "MDA", "SRB"}}, {"NOR", {"SWE", "DNK", "FIN", "ISL", "NLD"}},
      {"COR", {"MCK", "CAH", "CVS", "WBA", "HSIC"}}, {"CHD", {"PG", "CL", "KMB", "CLX", "EL"}},
      {"TEL", {"APH", "KEYS", "GLW", "HUBB", "ETN"}}, {"VZ", {"T", "TMUS", "CMCSA", "CHTR", "AMT"}}};
  auto map = bundled_map();
  EXPECT_EQ(map.size(), published.size());
  for (const auto& [focal, want] : published) {
    std::vector<std::string> got;
    for (const auto& e : consensus_filter(static_peers(map, focal, 10), 7)) got.push_back(e.id);
    EXPECT_EQ(got, want) << focal;
  }
}

TEST(ProviderConfig, ModeRequirements) {
  PeerProviderConfig c;
  EXPECT_THROW(c.check(), Error);  // static without a map path
  c.static_map_path = "x.json";
  EXPECT_NO_THROW(c.check());
  c.mode = ProviderMode::external;
  EXPECT_THROW(c.check(), Error);
  c.endpoint = "http://localhost:1/peers";
  EXPECT_NO_THROW(c.check());
  auto parsed = provider_config_from_json(
      Json::parse(R"({"mode":"external","endpoint":"http://h/p","samples":4,"timeout_ms":250,
                      "retry":{"max_attempts":2,"backoff_ms":10},"prompt_template_id":"stocks"})"));
  EXPECT_EQ(parsed.mode, ProviderMode::external);
  EXPECT_EQ(parsed.samples, 4);
  EXPECT_EQ(parsed.timeout, std::chrono::milliseconds(250));
  EXPECT_EQ(parsed.retry.max_attempts, 2);
  EXPECT_EQ(parsed.prompt_template_id, "stocks");
}

TEST(Prompts, TemplatesCarryProtocolTextAndFocal) {
  EXPECT_EQ(prompt_template_ids(), (std::vector<std::string>{"covid", "stocks"}));
  const auto& covid = prompt_template("covid");
  EXPECT_TRUE(covid.text.starts_with("You are curating contextual comparisons"));
  EXPECT_NE(covid.text.find("COVID-19 cumulative cases per million"), std::string::npos);
  EXPECT_TRUE(covid.text.ends_with("then alphabetically."));
  const auto& stocks = prompt_template("stocks");
  EXPECT_NE(stocks.text.find("S&P 500 stock price performance (percentage change)"), std::string::npos);
  EXPECT_TRUE(stocks.text.ends_with("then alphabetically by ticker."));
  auto p = render_prompt(covid, "GRC", "Greece", "rank estimate", 5);
  EXPECT_TRUE(p.starts_with(covid.text));
  EXPECT_NE(p.find("Highlighted country: Greece (GRC)"), std::string::npos);
  EXPECT_NE(p.find("Task context: rank estimate"), std::string::npos);
  EXPECT_THROW(prompt_template("weather"), Error);
}

TEST(Parse, AcceptsCommonListFormats) {
  auto a = bundled_aliases();
  const std::vector<std::string> want{"ITA", "ESP", "PRT", "CYP", "HRV"};
  EXPECT_EQ(parse_peer_response("Italy, Spain, Portugal, Cyprus, Croatia", a, "GRC").ids, want);
  EXPECT_EQ(parse_peer_response("1. Italy\n2. Spain\n3) Portugal\n4. Cyprus\n5. Croatia\n", a, "GRC").ids, want);
  EXPECT_EQ(parse_peer_response("- **Italy**\n- Spain\n- Portugal\n- Cyprus\n- Croatia", a, "GRC").ids, want);
  EXPECT_EQ(parse_peer_response("Italy; Spain; Portugal; Cyprus; and Croatia.", a, "GRC").ids, want);
  EXPECT_EQ(parse_peer_response("McKesson (MCK), CAH (Cardinal Health), CVS - pharmacy, WBA, HSIC", a, "COR").ids,
            (std::vector<std::string>{"MCK", "CAH", "CVS", "WBA", "HSIC"}));
}

TEST(Parse, DropsUnknownFocalAndDuplicates) {
  auto a = bundled_aliases();
  auto r = parse_peer_response("Italy, Atlantis, Greece, italy, Spain", a, "GRC");
  EXPECT_EQ(r.ids, (std::vector<std::string>{"ITA", "ESP"}));
  EXPECT_EQ(r.unknown, std::vector<std::string>{"Atlantis"});
}

TEST(Parse, TruncatesPastFive) {
  auto r = parse_peer_response("Italy, Spain, Portugal, Cyprus, Croatia, Malta", bundled_aliases(), "GRC");
  EXPECT_EQ(r.ids.size(), 5u);
  EXPECT_EQ(r.truncated, std::vector<std::string>{"MLT"});
}

TEST(Transcript, ReplayIsDeterministicAndRoundTrips) {
  std::vector<TranscriptEntry> t{{1, "p", "Spain, Italy", {"ESP", "ITA"}, ""},
                                 {0, "p", "Italy, Spain, Atlantis", {"ITA", "ESP"}, ""},
                                 {2, "p", std::nullopt, {}, "timeout"}};
  auto back = transcript_from_json(Json::parse(to_json(t).dump()));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].request_index, 0);
  EXPECT_FALSE(back[2].raw_response);
  auto a = bundled_aliases();
  auto first = replay_transcript(back, a, "GRC"), second = replay_transcript(back, a, "GRC");
  ASSERT_EQ(first.size(), 2u);
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].entities, second[i].entities);
    EXPECT_EQ(first[i].raw_response, second[i].raw_response);
  }
  EXPECT_EQ(first[0].entities, (std::vector<std::string>{"ITA", "ESP"}));
  TranscriptPeerProvider provider(back, a);
  EXPECT_EQ(provider.sample("GRC", "", 10).size(), 2u);
  EXPECT_EQ(provider.sample("GRC", "", 1).size(), 1u);
}

// Local stand-in for a model endpoint: POST {prompt} -> {text}.
class MockEndpoint {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit MockEndpoint(Handler handler) {
    server_.Post("/peers", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    while (!server_.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  PeerProviderConfig config(int timeout_ms = 2000, int attempts = 2) const {
    PeerProviderConfig c;
    c.mode = ProviderMode::external;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/peers";
    c.timeout = std::chrono::milliseconds(timeout_ms);
    c.retry = {attempts, std::chrono::milliseconds(5)};
    return c;
  }

  std::atomic<int> hits{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void reply(httplib::Response& res, const std::string& text) {
  res.set_content(Json{{"text", text}}.dump(), "application/json");
}

TEST(External, FixedTextParsesToIsoCodes) {
  MockEndpoint mock([](const httplib::Request& req, httplib::Response& res) {
    auto prompt = Json::parse(req.body).at("prompt").get<std::string>();
    reply(res, prompt.find("Greece") != std::string::npos ? "Italy, Spain, Portugal, Cyprus, Croatia" : "");
  });
  auto r = external_peers_with_transcript(mock.config(), bundled_aliases(), "GRC", "Greece", "", 10);
  ASSERT_EQ(r.lists.size(), 10u);
  EXPECT_EQ(r.lists[0].entities, (std::vector<std::string>{"ITA", "ESP", "PRT", "CYP", "HRV"}));
  EXPECT_EQ(r.lists[0].source, PeerSource::external);
  EXPECT_EQ(r.transcript.size(), 10u);
  EXPECT_EQ(r.transcript[3].request_index, 3);
  EXPECT_EQ(mock.hits, 10);
}

TEST(External, SixNamesTruncatedAndUnknownDropped) {
  MockEndpoint six([](const httplib::Request&, httplib::Response& res) {
    reply(res, "Italy, Spain, Portugal, Cyprus, Croatia, Malta");
  });
  auto r = external_peers_with_transcript(six.config(), bundled_aliases(), "GRC", "Greece", "", 3);
  EXPECT_EQ(r.lists[0].entities.size(), 5u);

  MockEndpoint mixed([](const httplib::Request&, httplib::Response& res) {
    reply(res, "Italy, Atlantis, Spain");
  });
  r = external_peers_with_transcript(mixed.config(), bundled_aliases(), "GRC", "Greece", "", 3);
  EXPECT_EQ(r.lists[0].entities, (std::vector<std::string>{"ITA", "ESP"}));
}

TEST(External, TooFewParseableListsFailsWithTranscript) {
  std::atomic<int> n{0};
  MockEndpoint mock([&n](const httplib::Request&, httplib::Response& res) {
    // 4 of 10 useful answers; ceil(10/2) = 5 are required.
    reply(res, n++ % 10 < 4 ? "Italy, Spain" : "Atlantis, Lemuria");
  });
  try {
    external_peers_with_transcript(mock.config(2000, 1), bundled_aliases(), "GRC", "Greece", "", 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::provider);
    EXPECT_NE(std::string(e.what()).find("Lemuria"), std::string::npos);
  }
}

TEST(External, RetriesServerErrors) {
  std::atomic<int> n{0};
  MockEndpoint mock([&n](const httplib::Request&, httplib::Response& res) {
    if (n++ < 4) {  // no request can exhaust 5 attempts on 4 failures
      res.status = 503;
      return;
    }
    reply(res, "Italy");
  });
  auto r = external_peers_with_transcript(mock.config(2000, 5), bundled_aliases(), "GRC", "Greece", "", 4);
  EXPECT_EQ(r.lists.size(), 4u);
  EXPECT_EQ(mock.hits, 8);
}

TEST(External, SlowEndpointRespectsDeadline) {
  MockEndpoint mock([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    reply(res, "Italy");
  });
  const auto start = std::chrono::steady_clock::now();
  try {
    external_peers_with_transcript(mock.config(200, 2), bundled_aliases(), "GRC", "Greece", "", 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::provider);
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  // timeout x attempts = 400 ms, plus scheduling slack.
  EXPECT_LT(elapsed, std::chrono::milliseconds(900));
}

TEST(External, UnreachableEndpointFails) {
  PeerProviderConfig c;
  c.mode = ProviderMode::external;
  c.endpoint = "http://127.0.0.1:9/peers";
  c.timeout = std::chrono::milliseconds(100);
  c.retry = {1, std::chrono::milliseconds(1)};
  EXPECT_THROW(external_peers_with_transcript(c, bundled_aliases(), "GRC", "Greece", "", 2), Error);
}

}  // namespace
}  // namespace guardrail
