#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "carebot/envelope.hpp"
#include "carebot/errors.hpp"
#include "carebot/scripted_backend.hpp"
#include "carebot/setup.hpp"
#include "test_support.hpp"

using namespace carebot;
using nlohmann::json;

namespace {

std::string detect_prompt(const std::string& transcript, const Catalog& catalog = builtin_seed_catalog()) {
  return render(TemplateId::DetectIntent, {{"known_intents", list_known_intents(catalog)},
                                           {"transcript", transcript},
                                           {"interlocutor", "senior"}});
}

ErrorCode load_error(const json& doc) {
  try {
    ScriptedBackend::from_json(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << doc.dump();
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ParsePrompt, RecoversSectionsAndDerivedFields) {
  const auto fields = parse_prompt(detect_prompt("[robot] Said: Hello\n[senior] Heard: Could you bring me some juice please\n"));
  ASSERT_TRUE(fields.template_id);
  EXPECT_EQ(*fields.template_id, TemplateId::DetectIntent);
  EXPECT_EQ(fields.value("interlocutor"), "senior");
  EXPECT_EQ(fields.value("utterance"), "Could you bring me some juice please");
  EXPECT_EQ(fields.value("requested_noun"), "juice");
  ASSERT_EQ(fields.known_intents.size(), 1u);
  EXPECT_EQ(fields.known_intents[0].name, "bring_goods");
  EXPECT_EQ(fields.value("no_such_field"), "");
}

TEST(ParsePrompt, ForeignTextHasNoTemplate) {
  EXPECT_FALSE(parse_prompt("hello there").template_id);
}

TEST(ScriptedBackend, FirstMatchingRuleWinsAndSubstitutes) {
  const auto backend = ScriptedBackend::from_json(json::parse(R"({"rules": [
    {"id": "a", "template": "DetectIntent", "when": {"utterance": "^bring me (\\w+)$"},
     "envelope": {"intent": "bring_goods", "slots": {"item": "${utterance.1}"}}},
    {"id": "b", "template": "DetectIntent", "envelope": {"intent": "unknown"}}
  ]})"));
  auto backend_copy = backend;
  const auto hit = parse_envelope(backend_copy.complete(detect_prompt("[senior] Heard: Bring me cocoa\n")));
  EXPECT_EQ(hit.at("slots").at("item"), "cocoa");
  const auto miss = parse_envelope(backend_copy.complete(detect_prompt("[senior] Heard: sing a song\n")));
  EXPECT_EQ(miss.at("intent"), "unknown");
}

TEST(ScriptedBackend, ContinueRulesContributeSlots) {
  auto backend = ScriptedBackend::from_json(json::parse(R"({"rules": [
    {"template": "DetectIntent", "continue": true, "when": {"utterance": "\\bhot\\b"}, "envelope": {"slots": {"temp": "hot"}}},
    {"template": "DetectIntent", "envelope": {"intent": "bring_goods", "slots": {"item": "tea"}}}
  ]})"));
  const auto env = parse_envelope(backend.complete(detect_prompt("[senior] Heard: hot tea\n")));
  EXPECT_EQ(env.at("slots").at("temp"), "hot");
  EXPECT_EQ(env.at("slots").at("item"), "tea");
}

TEST(ScriptedBackend, NoMatchIsProse) {
  auto backend = ScriptedBackend::from_json(json::parse(R"({"rules": []})"));
  EXPECT_FALSE(extract_first_object(backend.complete(detect_prompt("[senior] Heard: hi\n"))));
}

TEST(ScriptedBackend, PureFunctionOfPrompt) {
  auto backend = *carebot::testing::shipped_rules();
  const auto prompt = detect_prompt("[senior] Heard: Bring me tea with sugar\n");
  const auto first = backend.complete(prompt);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(backend.complete(prompt), first);
}

TEST(ScriptedBackend, ShippedTableLoads) {
  EXPECT_GT(carebot::testing::shipped_rules()->rule_count(), 10u);
  EXPECT_EQ(carebot::testing::shipped_rules()->identity(), "scripted");
}

TEST(ScriptedBackend, MalformedTablesAreInvalidConfig) {
  EXPECT_EQ(load_error(json::parse(R"({"nope": []})")), ErrorCode::InvalidConfig);
  EXPECT_EQ(load_error(json::parse(R"({"rules": [{"template": "Dance", "envelope": {}}]})")), ErrorCode::InvalidConfig);
  EXPECT_EQ(load_error(json::parse(R"({"rules": [{"template": "DetectIntent"}]})")), ErrorCode::InvalidConfig);
  EXPECT_EQ(load_error(json::parse(R"({"rules": [{"template": "DetectIntent", "when": {"utterance": "("}, "envelope": {}}]})")),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(load_error(json::parse(R"({"rules": [{"template": "DetectIntent", "when": {"utterance": 3}, "envelope": {}}]})")),
            ErrorCode::InvalidConfig);
}

TEST(ScriptedBackend, MissingFileIsIoFailure) {
  try {
    ScriptedBackend::from_file("/nonexistent/rules.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}
