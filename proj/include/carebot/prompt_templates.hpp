#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carebot/intent_catalog.hpp"

namespace carebot {

enum class TemplateId {
  DetectIntent,
  FillSlots,
  ClassifyReply,
  DeriveAddition,
  GenClarifyQuestion,
  GenKeeperRequest,
};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> template_id_from_string(std::string_view s);

struct PromptTemplate {
  TemplateId id;
  std::string_view body;
};

/// The six prompt roles the language processor uses.
const std::array<PromptTemplate, 6>& prompt_templates();

/// Placeholder names appearing in a template body, in order of first use.
std::vector<std::string> placeholders_of(TemplateId id);

using Bindings = std::map<std::string, std::string>;

/// Substitutes `{name}` placeholders in one pass; values are not re-scanned.
/// Throws MissingPlaceholder if the body uses a name absent from `bindings`.
std::string render(TemplateId id, const Bindings& bindings);

/// Appended to a prompt when the first completion held no usable envelope.
inline constexpr std::string_view kRetrySuffix =
    "\n\nAnswer with only the JSON object, without any other text.";

// Canonical text forms shared by the prompts and the scripted backend.

/// One intent per line: `- name(slot: a|b, slot2) :: description`.
std::string list_known_intents(const Catalog& catalog);
/// One slot per line: `- name; options: a|b; ask: question`.
std::string list_slots(const std::vector<SlotSpec>& slots);
/// One fill per line: `- slot: value`.
std::string list_fills(const std::map<std::string, std::string>& fills);

}  // namespace carebot
