#include <deque>
#include <random>

#include <gtest/gtest.h>

#include "carebot/errors.hpp"
#include "carebot/language_processor.hpp"
#include "carebot/names.hpp"
#include "carebot/setup.hpp"
#include "test_support.hpp"

using namespace carebot;
using carebot::testing::always_task;

namespace {

/// Replays canned completions and remembers the prompts it saw.
class CannedBackend : public CompletionBackend {
 public:
  explicit CannedBackend(std::deque<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    if (replies_.empty()) throw std::runtime_error("out of replies");
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }
  std::string identity() const override { return "canned"; }

  std::vector<std::string> prompts;

 private:
  std::deque<std::string> replies_;
};

class ScriptedLp : public ::testing::Test {
 protected:
  ScriptedBackend backend = *carebot::testing::shipped_rules();
  LanguageProcessor lp{backend};
};

Catalog with_juice() {
  auto c = builtin_seed_catalog();
  c.register_intent(IntentSpec{"bring_juice", "Bring juice", {SlotSpec::make("which")}, Origin::learned, 0},
                    "bring_goods_task", always_task);
  return c;
}

Catalog with_tea() {
  auto c = builtin_seed_catalog();
  c.register_intent(IntentSpec{"bring_tea", "Bring tea",
                               {SlotSpec::make("blackOrGreen", "", {"black", "green"})}, Origin::learned, 0},
                    "bring_goods_task", always_task);
  return c;
}

IntentSpec tea_spec() {
  return IntentSpec{"bring_tea", "", {SlotSpec::make("blackorgreen", "", {"black", "green"}), SlotSpec::make("sugar", "", {"yes", "no"})},
                    Origin::learned, 1};
}

}  // namespace

// --- detect_intent ----------------------------------------------------------

TEST_F(ScriptedLp, BringMeJuiceWithSeedCatalog) {
  const auto r = lp.detect_intent("bring me juice", builtin_seed_catalog(), "[senior] Heard: bring me juice\n");
  const auto* d = std::get_if<IntentDetected>(&r);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->intent_name, "bring_goods");
  EXPECT_EQ(d->slot_fills, (SlotFills{{"item", "juice"}}));
}

TEST_F(ScriptedLp, AppleJuiceFillsFocusSlot) {
  const Focus focus{"bring_juice", {}};
  const auto r = lp.detect_intent("Apple juice", with_juice(),
                                  "[senior] Heard: Bring me juice\n[robot] Said: What kind of juice would you like?\n",
                                  "Apple juice", focus);
  const auto* d = std::get_if<IntentDetected>(&r);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->intent_name, "bring_juice");
  EXPECT_EQ(d->slot_fills.at("which"), "apple");
}

TEST_F(ScriptedLp, GibberishIsUnknown) {
  const auto r = lp.detect_intent("flurb grizzle wap", builtin_seed_catalog(), "");
  EXPECT_TRUE(std::holds_alternative<Unknown>(r));
}

TEST_F(ScriptedLp, KnownItemIntentIsPicked) {
  const auto r = lp.detect_intent("Bring me juice", with_juice(), "");
  const auto* d = std::get_if<IntentDetected>(&r);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->intent_name, "bring_juice");
  EXPECT_TRUE(d->slot_fills.empty());
}

TEST_F(ScriptedLp, TeaModifiersAreExtracted) {
  const auto r = lp.detect_intent("Bring me black tea", with_tea(), "");
  const auto* d = std::get_if<IntentDetected>(&r);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->intent_name, "bring_tea");
  EXPECT_EQ(d->slot_fills.at("blackorgreen"), "black");
}

TEST(DetectIntent, NonCatalogIntentIsUnknown) {
  CannedBackend backend({R"({"intent": "bring_pizza", "slots": {}})"});
  LanguageProcessor lp(backend);
  EXPECT_TRUE(std::holds_alternative<Unknown>(lp.detect_intent("pizza", builtin_seed_catalog(), "")));
}

TEST(DetectIntent, UngroundedFillIsDroppedAndReported) {
  CannedBackend backend({R"({"intent": "bring_tea", "slots": {"blackOrGreen": "Black"}})"});
  LanguageProcessor lp(backend);
  const auto r = lp.detect_intent("Bring me tea", with_tea(), "[senior] Heard: Bring me tea\n");
  const auto& d = std::get<IntentDetected>(r);
  EXPECT_TRUE(d.slot_fills.empty());
  ASSERT_EQ(d.dropped.size(), 1u);
  EXPECT_EQ(d.dropped[0].slot, "blackorgreen");
  EXPECT_EQ(d.dropped[0].reason, "ungrounded");
}

TEST(DetectIntent, RetriesOnceThenSucceeds) {
  CannedBackend backend({"I think it's juice.", R"({"intent": "unknown"})"});
  LanguageProcessor lp(backend);
  EXPECT_TRUE(std::holds_alternative<Unknown>(lp.detect_intent("x", builtin_seed_catalog(), "")));
  ASSERT_EQ(backend.prompts.size(), 2u);
  EXPECT_EQ(backend.prompts[1], backend.prompts[0] + std::string(kRetrySuffix));
}

TEST(DetectIntent, SecondMalformedCompletionSurfaces) {
  CannedBackend backend({"nope", "still nope", R"({"intent": "unknown"})"});
  LanguageProcessor lp(backend);
  try {
    lp.detect_intent("x", builtin_seed_catalog(), "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedCompletion);
  }
  EXPECT_EQ(backend.prompts.size(), 2u);
}

TEST(DetectIntent, BackendExceptionBecomesBackendFailure) {
  CannedBackend backend({});
  LanguageProcessor lp(backend);
  try {
    lp.detect_intent("x", builtin_seed_catalog(), "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackendFailure);
  }
}

TEST(DetectIntent, EmptyUtteranceIsRejected) {
  CannedBackend backend({});
  LanguageProcessor lp(backend);
  EXPECT_THROW(lp.detect_intent("  ", builtin_seed_catalog(), ""), Error);
  EXPECT_TRUE(backend.prompts.empty());
}

// --- classify_keeper_reply --------------------------------------------------

TEST_F(ScriptedLp, ClassifyKeeperReplies) {
  const PendingRequest pending{"bring_goods", "juice", {{"item", "juice"}}};
  const auto q = lp.classify_keeper_reply("Which juice?", pending, "");
  EXPECT_EQ(q.kind, ReplyKind::unexpected_question);
  EXPECT_EQ(q.question_text, "Which juice?");
  EXPECT_EQ(lp.classify_keeper_reply("Here you are.", pending, "").kind, ReplyKind::confirmation);
  EXPECT_EQ(lp.classify_keeper_reply("We only have black coffee.", pending, "").kind,
            ReplyKind::availability_constraint);
  EXPECT_EQ(lp.classify_keeper_reply("Okay, one moment.", pending, "").kind, ReplyKind::answer);
}

TEST(ClassifyKeeperReply, UnknownKindIsMalformed) {
  CannedBackend backend({R"({"kind": "shrug"})", R"({"kind": "shrug"})"});
  LanguageProcessor lp(backend);
  EXPECT_THROW(lp.classify_keeper_reply("hm", PendingRequest{"bring_goods", "tea", {}}, ""), Error);
}

// --- derive_addition ----------------------------------------------------------

TEST_F(ScriptedLp, WhichJuiceProposesNewIntent) {
  const auto a = lp.derive_addition("Which juice?", std::string("bring_goods"), "juice", {{"item", "juice"}},
                                    builtin_seed_catalog(), "");
  EXPECT_EQ(a.intent_name, "bring_juice");
  EXPECT_EQ(a.slot.name, "which");
  EXPECT_TRUE(a.slot.required);
  EXPECT_FALSE(a.options);
}

TEST_F(ScriptedLp, WithSugarAddsSlotToExistingIntent) {
  const auto a = lp.derive_addition("With sugar?", std::string("bring_tea"), "tea", {{"blackorgreen", "black"}},
                                    with_tea(), "");
  EXPECT_EQ(a.intent_name, "bring_tea");
  EXPECT_EQ(a.slot.name, "sugar");
  EXPECT_EQ(a.slot.options, (std::vector<std::string>{"yes", "no"}));
}

TEST_F(ScriptedLp, OnlyBlackCoffeeProposesOptions) {
  const auto a = lp.derive_addition("We only have black coffee.", std::string("bring_goods"), "coffee",
                                    {{"item", "coffee"}}, builtin_seed_catalog(), "");
  EXPECT_EQ(a.intent_name, "bring_coffee");
  EXPECT_EQ(a.slot.name, "type");
  ASSERT_TRUE(a.options);
  EXPECT_EQ(*a.options, (std::vector<std::string>{"black"}));
}

TEST_F(ScriptedLp, BlackOrGreenQuestionNamesTheSlot) {
  const auto a = lp.derive_addition("Black or green tea?", std::string("bring_goods"), "tea", {{"item", "tea"}},
                                    builtin_seed_catalog(), "");
  EXPECT_EQ(a.intent_name, "bring_tea");
  EXPECT_EQ(a.slot.name, "blackorgreen");
  EXPECT_EQ(a.slot.options, (std::vector<std::string>{"black", "green"}));
}

// --- generate_clarifying_question --------------------------------------------

TEST_F(ScriptedLp, WhatKindOfJuice) {
  const auto c = with_juice();
  const auto q = lp.generate_clarifying_question(*c.find("bring_juice"), "which", "juice", {}, "");
  EXPECT_EQ(q.text, "What kind of juice would you like?");
}

TEST_F(ScriptedLp, CannedQuestionIsVerbatim) {
  IntentSpec spec{"bring_cake", "", {SlotSpec::make("size", "", {}, true, "How big a slice, dear?")}, Origin::learned, 1};
  EXPECT_EQ(lp.generate_clarifying_question(spec, "size", "cake", {}, "").text, "How big a slice, dear?");
}

TEST_F(ScriptedLp, OptionsAreMentioned) {
  const auto q = lp.generate_clarifying_question(tea_spec(), "blackorgreen", "tea", {}, "");
  EXPECT_NE(q.text.find("black"), std::string::npos) << q.text;
  EXPECT_NE(q.text.find("green"), std::string::npos) << q.text;
}

TEST_F(ScriptedLp, ClarifyingErrors) {
  const auto spec = tea_spec();
  try {
    lp.generate_clarifying_question(spec, "size", "tea", {}, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSlot);
  }
  EXPECT_THROW(lp.generate_clarifying_question(spec, "sugar", "tea", {{"sugar", "yes"}}, ""), Error);
}

// --- generate_keeper_request -------------------------------------------------

TEST_F(ScriptedLp, KeeperRequests) {
  const auto plain = lp.generate_keeper_request(PendingRequest{"bring_goods", "juice", {{"item", "juice"}}}, "");
  EXPECT_NE(plain.text.find("juice"), std::string::npos);

  const auto apple = lp.generate_keeper_request(PendingRequest{"bring_juice", "juice", {{"which", "apple"}}}, "");
  EXPECT_NE(apple.text.find("juice"), std::string::npos);
  EXPECT_NE(apple.text.find("apple"), std::string::npos);

  const auto minimal = lp.generate_keeper_request(PendingRequest{"bring_tea", "tea", {}}, "");
  EXPECT_FALSE(minimal.text.empty());
}

TEST(KeeperRequest, MissingValuesAreAppended) {
  CannedBackend backend({R"({"text": "Tea please."})"});
  LanguageProcessor lp(backend);
  const auto r = lp.generate_keeper_request(PendingRequest{"bring_tea", "tea", {{"sugar", "yes"}, {"blackorgreen", "green"}}}, "");
  EXPECT_NE(r.text.find("green"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("sugar: yes"), std::string::npos) << r.text;
}

TEST(GeneratedText, EmptyTextIsMalformed) {
  CannedBackend backend({R"({"text": "  "})", R"({"text": ""})"});
  LanguageProcessor lp(backend);
  EXPECT_THROW(lp.generate_keeper_request(PendingRequest{"bring_tea", "tea", {}}, ""), Error);
}

// --- grounding_filter ----------------------------------------------------------

TEST(GroundingFilter, UngroundedBlackIsDropped) {
  const auto r = grounding_filter({{"blackOrGreen", "Black"}}, tea_spec(), "[senior] Heard: Bring me tea\n");
  EXPECT_TRUE(r.kept.empty());
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].reason, "ungrounded");
}

TEST(GroundingFilter, SaidValueIsKept) {
  IntentSpec juice{"bring_juice", "", {SlotSpec::make("which")}, Origin::learned, 1};
  const auto r = grounding_filter({{"which", "apple"}}, juice, "[senior] Heard: Apple juice\n");
  EXPECT_EQ(r.kept, (SlotFills{{"which", "apple"}}));
  EXPECT_TRUE(r.dropped.empty());
}

TEST(GroundingFilter, CanonicalizesToStoredOption) {
  const auto r = grounding_filter({{"blackorgreen", "BLACK"}}, tea_spec(), "black tea please");
  EXPECT_EQ(r.kept.at("blackorgreen"), "black");
}

TEST(GroundingFilter, NonOptionAndUnknownSlotAreDropped) {
  const auto r = grounding_filter({{"blackorgreen", "red"}, {"size", "large"}}, tea_spec(), "red tea, large");
  EXPECT_TRUE(r.kept.empty());
  ASSERT_EQ(r.dropped.size(), 2u);
  std::set<std::string> reasons{r.dropped[0].reason, r.dropped[1].reason};
  EXPECT_TRUE(reasons.contains("not an option"));
  EXPECT_TRUE(reasons.contains("unknown slot"));
}

TEST(GroundingFilter, YesNoFromPhrasing) {
  const auto spec = tea_spec();
  EXPECT_EQ(grounding_filter({{"sugar", "yes"}}, spec, "tea with sugar").kept.at("sugar"), "yes");
  EXPECT_EQ(grounding_filter({{"sugar", "no"}}, spec, "tea without sugar").kept.at("sugar"), "no");
  EXPECT_EQ(grounding_filter({{"sugar", "no"}}, spec, "no sugar please").kept.at("sugar"), "no");
  EXPECT_TRUE(grounding_filter({{"sugar", "yes"}}, spec, "tea without sugar").kept.empty());
  EXPECT_TRUE(grounding_filter({{"sugar", "no"}}, spec, "tea with sugar").kept.empty());
}

TEST(GroundingFilter, SubsetAndIdempotent) {
  std::mt19937 rng(11);
  const std::vector<std::string> words{"black", "green", "yes", "no", "apple", "Black", "tea", "sugar", ""};
  const std::vector<std::string> slots{"blackorgreen", "sugar", "which", "BlackOrGreen"};
  const auto spec = tea_spec();
  for (int i = 0; i < 2000; ++i) {
    SlotFills fills;
    std::string transcript;
    for (int k = 0; k < 3; ++k) fills[slots[rng() % slots.size()]] = words[rng() % words.size()];
    for (int k = 0; k < 4; ++k) transcript += words[rng() % words.size()] + " ";
    const auto once = grounding_filter(fills, spec, transcript);
    for (const auto& [slot, value] : once.kept) {
      bool found = false;
      for (const auto& [s, v] : fills) found |= normalize_name(s) == slot && fold_value(v) == value;
      ASSERT_TRUE(found) << slot << "=" << value;
    }
    const auto twice = grounding_filter(once.kept, spec, transcript);
    ASSERT_EQ(twice.kept, once.kept);
    ASSERT_TRUE(twice.dropped.empty());
  }
}

TEST(WithLatestHeard, AppendsOnlyWhenMissing) {
  EXPECT_EQ(with_latest_heard("", "senior", "hi"), "[senior] Heard: hi");
  EXPECT_EQ(with_latest_heard("[senior] Heard: hi", "senior", "hi"), "[senior] Heard: hi");
  EXPECT_EQ(with_latest_heard("[senior] Heard: hi\n[robot] Said: ok", "senior", "yes"),
            "[senior] Heard: hi\n[robot] Said: ok\n[senior] Heard: yes");
  EXPECT_EQ(with_latest_heard("[robot] Said: ok\n", "senior", "yes"), "[robot] Said: ok\n[senior] Heard: yes");
}

TEST(Determinism, ScriptedPipelineIsPure) {
  const auto& rules = *carebot::testing::shipped_rules();
  ScriptedBackend a = rules;
  ScriptedBackend b = rules;
  LanguageProcessor la(a);
  LanguageProcessor lb(b);
  for (const auto* u : {"Bring me juice", "Bring me black tea with sugar", "blah", "Bring me green coffee"}) {
    const auto ra = la.detect_intent(u, with_tea(), "");
    const auto rb = lb.detect_intent(u, with_tea(), "");
    ASSERT_EQ(ra.index(), rb.index());
    if (const auto* d = std::get_if<IntentDetected>(&ra)) {
      EXPECT_EQ(d->intent_name, std::get<IntentDetected>(rb).intent_name);
      EXPECT_EQ(d->slot_fills, std::get<IntentDetected>(rb).slot_fills);
    }
  }
}
