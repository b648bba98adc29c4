#include "carebot/prompt_templates.hpp"

#include <algorithm>

#include "carebot/errors.hpp"

namespace carebot {

namespace {

constexpr std::string_view kDetectIntent = R"(TEMPLATE: DetectIntent
You are the dialogue manager of an assistant robot in a care home. Decide which
known intent the latest utterance of the {interlocutor} expresses and extract the
slot values that were explicitly said. Never guess values that were not said.
Use "unknown" when no known intent fits.
Reply with one JSON object: {"intent": "<intent name or unknown>", "slots": {"<slot>": "<value>"}}

## Known intents
{known_intents}
## Conversation
{transcript}
## Speaker
{interlocutor}
)";

constexpr std::string_view kFillSlots = R"(TEMPLATE: FillSlots
You are the dialogue manager of an assistant robot in a care home. The robot asked
the {interlocutor} to clarify the request below. Extract the values of the missing
slots from the latest utterance. Only use values that were explicitly said.
Reply with one JSON object: {"intent": "<focus intent>", "slots": {"<slot>": "<value>"}}

## Known intents
{known_intents}
## Conversation
{transcript}
## Speaker
{interlocutor}
## Focus intent
{focus_intent}
## Missing slots
{missing_slots}
## Filled slots
{filled_slots}
)";

constexpr std::string_view kClassifyReply = R"(TEMPLATE: ClassifyReply
The robot asked the {interlocutor} for an item described below. Classify the latest
reply of the {interlocutor} as exactly one of:
- "confirmation": the item is being handed over,
- "availability_constraint": only some variants of the item are available,
- "unexpected_question": a question the robot cannot answer from the request,
- "answer": anything else.
Reply with one JSON object: {"kind": "<kind>", "question": "<question text, if any>"}

## Conversation
{transcript}
## Speaker
{interlocutor}
## Focus intent
{focus_intent}
## Filled slots
{filled_slots}
)";

constexpr std::string_view kDeriveAddition = R"(TEMPLATE: DeriveAddition
While fetching an item the robot heard the latest utterance of the {interlocutor},
which the known intents cannot answer. Propose what to add to the intent database:
a new slot on an existing intent, or a new intent named bring_<item> with one slot.
If the utterance limits the available variants, list them as "options".
Reply with one JSON object: {"intent": "<intent>", "slot": {"name": "<slot>", "description": "<text>", "options": ["<value>"]}, "options": ["<available value>"]}

## Known intents
{known_intents}
## Conversation
{transcript}
## Speaker
{interlocutor}
## Focus intent
{focus_intent}
## Filled slots
{filled_slots}
)";

constexpr std::string_view kGenClarifyQuestion = R"(TEMPLATE: GenClarifyQuestion
You are an assistant robot in a care home talking to the {interlocutor}. Ask one short,
polite question that obtains the first missing slot of the request. Mention the
available options when there are any.
Reply with one JSON object: {"text": "<question>"}

## Conversation
{transcript}
## Speaker
{interlocutor}
## Focus intent
{focus_intent}
## Missing slots
{missing_slots}
## Filled slots
{filled_slots}
)";

constexpr std::string_view kGenKeeperRequest = R"(TEMPLATE: GenKeeperRequest
You are an assistant robot in a care home. You reached the {interlocutor} and must ask
for the item a senior requested. Name the item and every filled slot value.
Reply with one JSON object: {"text": "<request>"}

## Conversation
{transcript}
## Speaker
{interlocutor}
## Focus intent
{focus_intent}
## Filled slots
{filled_slots}
)";

constexpr std::array<PromptTemplate, 6> kTemplates = {{
    {TemplateId::DetectIntent, kDetectIntent},
    {TemplateId::FillSlots, kFillSlots},
    {TemplateId::ClassifyReply, kClassifyReply},
    {TemplateId::DeriveAddition, kDeriveAddition},
    {TemplateId::GenClarifyQuestion, kGenClarifyQuestion},
    {TemplateId::GenKeeperRequest, kGenKeeperRequest},
}};

constexpr std::array<std::string_view, 6> kNames = {
    "DetectIntent",   "FillSlots",          "ClassifyReply",
    "DeriveAddition", "GenClarifyQuestion", "GenKeeperRequest"};

bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_text for literal runs and on_name for each `{name}` placeholder.
template <typename Text, typename Name>
void scan_body(std::string_view body, Text&& on_text, Name&& on_name) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = open + 1;
    while (close < body.size() && is_placeholder_char(body[close])) ++close;
    if (close < body.size() && body[close] == '}' && close > open + 1) {
      on_text(body.substr(pos, open - pos));
      on_name(body.substr(open + 1, close - open - 1));
      pos = close + 1;
    } else {
      on_text(body.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  on_text(body.substr(pos));
}

std::string one_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

std::string join_options(const std::vector<std::string>& options) {
  std::string out;
  for (const auto& o : options) {
    if (!out.empty()) out += '|';
    out += one_line(o);
  }
  return out;
}

}  // namespace

std::string_view to_string(TemplateId id) { return kNames.at(static_cast<std::size_t>(id)); }

std::optional<TemplateId> template_id_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<TemplateId>(i);
  }
  return std::nullopt;
}

const std::array<PromptTemplate, 6>& prompt_templates() { return kTemplates; }

std::vector<std::string> placeholders_of(TemplateId id) {
  std::vector<std::string> names;
  scan_body(
      kTemplates.at(static_cast<std::size_t>(id)).body, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

std::string render(TemplateId id, const Bindings& bindings) {
  std::string out;
  scan_body(
      kTemplates.at(static_cast<std::size_t>(id)).body, [&](std::string_view text) { out += text; },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) {
          throw Error(ErrorCode::MissingPlaceholder,
                      std::string(to_string(id)) + " needs a binding for {" + std::string(name) + "}");
        }
        out += it->second;
      });
  return out;
}

std::string list_known_intents(const Catalog& catalog) {
  std::string out;
  for (const auto& intent : catalog.list_intents()) {
    if (!out.empty()) out += '\n';
    out += "- " + intent.name + "(";
    for (std::size_t i = 0; i < intent.slots.size(); ++i) {
      const auto& slot = intent.slots[i];
      if (i > 0) out += ", ";
      out += slot.name;
      if (slot.constrained()) out += ": " + join_options(slot.options);
    }
    out += ")";
    if (!intent.description.empty()) out += " :: " + one_line(intent.description);
  }
  return out;
}

std::string list_slots(const std::vector<SlotSpec>& slots) {
  std::string out;
  for (const auto& slot : slots) {
    if (!out.empty()) out += '\n';
    out += "- " + slot.name;
    if (slot.constrained()) out += "; options: " + join_options(slot.options);
    if (slot.clarifying_question) out += "; ask: " + one_line(*slot.clarifying_question);
  }
  return out;
}

std::string list_fills(const std::map<std::string, std::string>& fills) {
  std::string out;
  for (const auto& [slot, value] : fills) {
    if (!out.empty()) out += '\n';
    out += "- " + slot + ": " + one_line(value);
  }
  return out;
}

}  // namespace carebot
