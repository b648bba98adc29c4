#include <random>

#include <gtest/gtest.h>

#include "carebot/envelope.hpp"
#include "carebot/errors.hpp"

using namespace carebot;

TEST(ParseEnvelope, ProseAroundObject) {
  const auto j = parse_envelope(R"(Sure! {"intent":"bring_juice","slots":{"which":"apple"}})");
  EXPECT_EQ(j.at("intent"), "bring_juice");
  EXPECT_EQ(j.at("slots").at("which"), "apple");
}

TEST(ParseEnvelope, PlainProseIsMalformed) {
  try {
    parse_envelope("I would bring the juice.");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedCompletion);
  }
}

TEST(ParseEnvelope, FirstObjectWins) {
  const auto j = parse_envelope(R"(first {"intent":"a"} then {"intent":"b"})");
  EXPECT_EQ(j.at("intent"), "a");
}

TEST(ParseEnvelope, BracesInsideStrings) {
  const auto j = parse_envelope(R"(note: {"text":"a } brace and \" quote {"} trailing)");
  EXPECT_EQ(j.at("text"), "a } brace and \" quote {");
}

TEST(ParseEnvelope, SkipsUnparsableSpanAndFindsNext) {
  const auto j = parse_envelope(R"({not json} but this is {"kind":"confirmation"})");
  EXPECT_EQ(j.at("kind"), "confirmation");
}

TEST(ParseEnvelope, NestedObject) {
  const auto j = parse_envelope("```json\n{\"slot\": {\"name\": \"which\", \"options\": []}}\n```");
  EXPECT_EQ(j.at("slot").at("name"), "which");
}

TEST(ParseEnvelope, UnbalancedIsMalformed) {
  EXPECT_THROW(parse_envelope(R"({"intent": "x")"), Error);
  EXPECT_THROW(parse_envelope(""), Error);
  EXPECT_THROW(parse_envelope("[1, 2]"), Error);
}

TEST(ExtractFirstObject, NeverThrowsOnRandomBytes) {
  std::mt19937 rng(7);
  const std::string alphabet = "{}[]\":,\\ abc01\n\t\x80\xff";
  for (int i = 0; i < 5000; ++i) {
    std::string s(rng() % 64, ' ');
    for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
    const auto r = extract_first_object(s);
    if (r) EXPECT_TRUE(r->is_object());
  }
}
