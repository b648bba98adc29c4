#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/completion_backend.hpp"
#include "carebot/prompt_templates.hpp"

namespace carebot {

/// A prompt taken apart again: its template id, raw sections, and the
/// derived fields that rules can match on and substitute.
struct PromptFields {
  struct KnownSlot {
    std::string name;
    std::vector<std::string> options;
  };
  struct KnownIntent {
    std::string name;
    std::vector<KnownSlot> slots;
  };

  std::optional<TemplateId> template_id;
  std::vector<KnownIntent> known_intents;
  std::vector<KnownSlot> missing_slots;
  std::map<std::string, std::string> filled;
  /// Everything a rule can reference by name, e.g. "utterance", "item", "slot".
  std::map<std::string, std::string> values;

  const std::string& value(const std::string& name) const;
  const KnownIntent* find_intent(std::string_view name) const;
};

PromptFields parse_prompt(std::string_view prompt);

struct ScriptedRule {
  struct Condition {
    std::string field;
    std::string pattern;
    std::regex regex;
  };

  std::string id;
  TemplateId template_id;
  std::vector<Condition> when;
  nlohmann::json envelope;
  /// Contributes its slots and keeps scanning instead of ending the match.
  bool keep_scanning = false;
  /// Adds fills for slot options that appear as words in the utterance.
  bool extract_options = false;
};

/// Deterministic rule-table stand-in for a language model. The completion is
/// a pure function of the prompt text.
///
/// Rules for the prompt's template are scanned in order. Every condition is
/// a case-insensitive regex search over a prompt field. `${field}` and
/// `${field.N}` (capture group N of that field's condition) are substituted
/// into every string of the envelope. Rules marked `continue` only add slot
/// fills; the first other matching rule provides the envelope.
class ScriptedBackend : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptedRule> rules);

  /// Throws InvalidConfig for a malformed rule table.
  static ScriptedBackend from_json(const nlohmann::json& doc);
  static ScriptedBackend from_file(const std::filesystem::path& path);

  std::string complete(const std::string& prompt) override;
  std::string identity() const override { return "scripted"; }

  std::size_t rule_count() const { return rules_.size(); }

 private:
  std::vector<ScriptedRule> rules_;
};

}  // namespace carebot
