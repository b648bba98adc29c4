#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "carebot/errors.hpp"
#include "carebot/http_service.hpp"
#include "test_support.hpp"

using namespace carebot;
using carebot::testing::Engine;
using nlohmann::json;

namespace {

class HttpFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    port = service.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    server = std::thread([this] { service.serve(); });
    for (int i = 0; i < 200 && !service.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    ASSERT_TRUE(service.running());
  }
  void TearDown() override {
    service.stop();
    if (server.joinable()) server.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }

  std::string create(const json& body = json::object()) {
    auto res = client().Post("/sessions", body.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body).at("session_id").get<std::string>();
  }

  httplib::Result say(const std::string& id, const std::string& actor, const std::string& text) {
    return client().Post("/sessions/" + id + "/utterances", json{{"actor", actor}, {"text", text}}.dump(),
                         "application/json");
  }

  /// Reads the event stream until `want` events arrived or the stream ended.
  std::vector<json> read_stream(const std::string& id, std::size_t want, const std::string& query = "?from=1",
                                httplib::Headers headers = {}, bool* saw_end = nullptr) {
    std::vector<json> frames;
    std::string buffer;
    auto c = client();
    c.Get("/sessions/" + id + "/events" + query, headers, [&](const char* data, std::size_t len) {
      buffer.append(data, len);
      std::size_t cut;
      while ((cut = buffer.find("\n\n")) != std::string::npos) {
        const auto frame = buffer.substr(0, cut);
        buffer.erase(0, cut + 2);
        if (frame.rfind("event: end", 0) == 0) {
          if (saw_end) *saw_end = true;
          return false;
        }
        const auto data_at = frame.find("data: ");
        if (frame.rfind("id: ", 0) == 0 && data_at != std::string::npos) {
          auto j = json::parse(frame.substr(data_at + 6));
          EXPECT_EQ(frame.substr(4, frame.find('\n') - 4), std::to_string(j.at("seq").get<std::uint64_t>()));
          frames.push_back(std::move(j));
        }
      }
      return frames.size() < want;
    });
    return frames;
  }

  Engine engine;
  HttpService service{engine.gateway};
  int port = 0;
  std::thread server;
};

}  // namespace

TEST_F(HttpFixture, CreateAndInspectSession) {
  const auto id = create({{"mode", "scripted_keeper"}, {"backend", "scripted"}});
  auto res = client().Get("/sessions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto info = json::parse(res->body);
  EXPECT_EQ(info.at("robot_location"), "senior_room");
  EXPECT_EQ(info.at("status"), "quiescent");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(HttpFixture, WorldOverrideByPath) {
  const auto id = create({{"world", (carebot::testing::fixture_dir() / "sandwich_world.json").string()}});
  auto res = say(id, "senior", "Bring me a sandwich");
  ASSERT_TRUE(res);
  EXPECT_NE(res->body.find("White or rye bread?"), std::string::npos);

  auto bad = client().Post("/sessions", json{{"world", "/nonexistent/world.json"}}.dump(), "application/json");
  EXPECT_EQ(bad->status, 400);
}

TEST_F(HttpFixture, UtterancesReturnTheStepEvents) {
  const auto id = create();
  auto res = say(id, "senior", "Bring me juice");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto events = json::parse(res->body).at("events");
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.front().at("kind"), "Heard");
  EXPECT_EQ(events.back().at("payload").at("text"), "What kind of juice would you like?");

  auto catalog = client().Get("/catalog");
  ASSERT_TRUE(catalog);
  EXPECT_EQ(catalog->body, engine.gateway.catalog_document());
  EXPECT_TRUE(Catalog::from_document(catalog->body).contains("bring_juice"));
}

TEST_F(HttpFixture, ErrorStatuses) {
  const auto id = create();
  EXPECT_EQ(say("nope", "senior", "hi")->status, 404);
  EXPECT_EQ(client().Get("/sessions/nope")->status, 404);
  EXPECT_EQ(client().Get("/sessions/nope/events")->status, 404);
  const auto keeper = say(id, "keeper", "Which juice?");
  EXPECT_EQ(keeper->status, 403);
  EXPECT_EQ(json::parse(keeper->body).at("error"), "ActorNotAllowed");
  EXPECT_EQ(say(id, "wizard", "hi")->status, 400);
  EXPECT_EQ(say(id, "senior", "")->status, 400);
  EXPECT_EQ(client().Post("/sessions/" + id + "/utterances", "{not json", "application/json")->status, 400);
  EXPECT_EQ(client().Post("/sessions", json{{"backend", "oracle"}}.dump(), "application/json")->status, 502);
  EXPECT_EQ(client().Post("/sessions", json{{"mode", "chaos"}}.dump(), "application/json")->status, 400);

  EXPECT_EQ(client().Post("/sessions/" + id + "/close", "", "application/json")->status, 200);
  EXPECT_EQ(say(id, "senior", "hi")->status, 409);
  EXPECT_EQ(client().Options("/sessions")->status, 204);
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::UnknownSession), 404);
  EXPECT_EQ(http_status(ErrorCode::ActorNotAllowed), 403);
  EXPECT_EQ(http_status(ErrorCode::SessionClosed), 409);
  EXPECT_EQ(http_status(ErrorCode::BackendFailure), 502);
  EXPECT_EQ(http_status(ErrorCode::BackendUnavailable), 502);
  EXPECT_EQ(http_status(ErrorCode::MalformedCompletion), 502);
  EXPECT_EQ(http_status(ErrorCode::InvalidArgument), 400);
  EXPECT_EQ(http_status(ErrorCode::InvalidConfig), 400);
  EXPECT_EQ(http_status(ErrorCode::CorruptCatalog), 500);
}

TEST_F(HttpFixture, StreamReplaysHistoryThenLiveTail) {
  const auto id = create();
  say(id, "senior", "Bring me juice");
  const auto history = engine.gateway.events({id}).size();

  std::vector<json> frames;
  std::thread reader([&] { frames = read_stream(id, history + 3); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  say(id, "senior", "Apple juice");
  reader.join();

  ASSERT_GE(frames.size(), history + 3);
  const auto all = engine.gateway.events({id});
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].at("seq"), i + 1);
    EXPECT_TRUE(event_from_json(frames[i]).same_as(all[i]));
  }
}

TEST_F(HttpFixture, ResumeWithLastEventIdHasNoGap) {
  const auto id = create();
  say(id, "senior", "Bring me juice");
  engine.gateway.close_session({id});
  const auto total = engine.gateway.events({id}).size();
  const std::size_t k = total / 2;

  bool ended = false;
  const auto resumed = read_stream(id, total, "", {{"Last-Event-ID", std::to_string(k)}}, &ended);
  ASSERT_FALSE(resumed.empty());
  EXPECT_EQ(resumed.front().at("seq"), k + 1);
  EXPECT_EQ(resumed.back().at("seq"), total);
  EXPECT_TRUE(ended);

  const auto from_query = read_stream(id, total, "?from=" + std::to_string(k));
  EXPECT_EQ(from_query.front().at("seq"), k);
}

TEST_F(HttpFixture, ClosedSessionStreamsHistoryThenEnds) {
  const auto id = create();
  say(id, "senior", "flurb");
  client().Post("/sessions/" + id + "/close", "", "application/json");
  bool ended = false;
  const auto frames = read_stream(id, 1000, "?from=1", {}, &ended);
  EXPECT_EQ(frames.size(), engine.gateway.events({id}).size());
  EXPECT_TRUE(ended);
}
