#include <gtest/gtest.h>

#include "carebot/errors.hpp"
#include "carebot/prompt_templates.hpp"
#include "carebot/setup.hpp"

using namespace carebot;

namespace {

Bindings full_bindings() {
  return {{"known_intents", list_known_intents(builtin_seed_catalog())},
          {"transcript", "[senior] Heard: Bring me juice\n[robot] Said: Right away.\n"},
          {"interlocutor", "senior"},
          {"focus_intent", "bring_juice"},
          {"missing_slots", "- which"},
          {"filled_slots", ""}};
}

}  // namespace

TEST(PromptTemplates, ExactlySixDistinctRoles) {
  const auto& all = prompt_templates();
  ASSERT_EQ(all.size(), 6u);
  std::set<TemplateId> ids;
  for (const auto& t : all) {
    ids.insert(t.id);
    EXPECT_FALSE(t.body.empty());
    EXPECT_EQ(template_id_from_string(to_string(t.id)), t.id);
  }
  EXPECT_EQ(ids.size(), 6u);
}

TEST(Render, DetectIntentCarriesCatalogAndTranscript) {
  const auto b = full_bindings();
  const auto prompt = render(TemplateId::DetectIntent, b);
  EXPECT_NE(prompt.find(b.at("known_intents")), std::string::npos);
  EXPECT_NE(prompt.find("[senior] Heard: Bring me juice"), std::string::npos);
  EXPECT_NE(prompt.find("[robot] Said: Right away."), std::string::npos);
  for (const auto& name : placeholders_of(TemplateId::DetectIntent)) {
    EXPECT_EQ(prompt.find("{" + name + "}"), std::string::npos) << name;
  }
}

TEST(Render, UnboundPlaceholderIsMissing) {
  auto b = full_bindings();
  b.erase("transcript");
  try {
    render(TemplateId::DetectIntent, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPlaceholder);
  }
}

TEST(Render, EmptyTranscriptIsFine) {
  auto b = full_bindings();
  b["transcript"] = "";
  EXPECT_NO_THROW(render(TemplateId::DetectIntent, b));
}

TEST(Render, ValuesAreNotRescanned) {
  auto b = full_bindings();
  b["transcript"] = "[senior] Heard: say {interlocutor}\n";
  const auto prompt = render(TemplateId::DetectIntent, b);
  EXPECT_NE(prompt.find("say {interlocutor}"), std::string::npos);
}

TEST(Render, EveryTemplateRendersWithFullBindings) {
  for (const auto& t : prompt_templates()) {
    const auto prompt = render(t.id, full_bindings());
    EXPECT_NE(prompt.find(std::string(to_string(t.id))), std::string::npos);
  }
}

TEST(Listings, CanonicalForms) {
  Catalog c = builtin_seed_catalog();
  c.register_intent(IntentSpec{"bring_tea", "Tea", {SlotSpec::make("blackOrGreen", "", {"black", "green"}),
                                                     SlotSpec::make("sugar")},
                               Origin::learned, 0},
                    "bring_goods_task", [](std::string_view) { return true; });
  const auto listing = list_known_intents(c);
  EXPECT_NE(listing.find("- bring_tea(blackorgreen: black|green, sugar) :: Tea"), std::string::npos) << listing;
  EXPECT_EQ(list_fills({{"which", "apple"}}), "- which: apple");
  EXPECT_EQ(list_slots({SlotSpec::make("which", "", {"apple", "orange"}, true, "Which juice?")}),
            "- which; options: apple|orange; ask: Which juice?");
}
