#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/completion_backend.hpp"
#include "carebot/intent_catalog.hpp"
#include "carebot/prompt_templates.hpp"

namespace carebot {

using SlotFills = std::map<std::string, std::string>;

struct DroppedFill {
  std::string slot;
  std::string value;
  std::string reason;  // "ungrounded", "not an option", "unknown slot", "empty"

  friend bool operator==(const DroppedFill&, const DroppedFill&) = default;
};

struct GroundingResult {
  SlotFills kept;
  std::vector<DroppedFill> dropped;
};

/// Keeps only fills whose value was actually said (case-insensitive substring
/// of `transcript`) and, for constrained slots, matches a stored option. Kept
/// values take the stored option spelling.
GroundingResult grounding_filter(const SlotFills& fills, const IntentSpec& intent,
                                 std::string_view transcript);

std::string describe(const std::vector<DroppedFill>& dropped);

// --- interpretations -------------------------------------------------------

struct IntentDetected {
  std::string intent_name;
  SlotFills slot_fills;
  std::vector<DroppedFill> dropped;
};

struct Unknown {};

enum class ReplyKind { answer, unexpected_question, availability_constraint, confirmation };

std::string_view to_string(ReplyKind kind);
std::optional<ReplyKind> reply_kind_from_string(std::string_view s);

struct ReplyClassified {
  ReplyKind kind = ReplyKind::answer;
  std::optional<std::string> question_text;
};

struct AdditionProposed {
  std::string intent_name;
  SlotSpec slot;
  std::optional<std::vector<std::string>> options;
};

struct UtteranceGenerated {
  std::string text;
};

using Interpretation =
    std::variant<IntentDetected, Unknown, ReplyClassified, AdditionProposed, UtteranceGenerated>;

/// Slot-filling context: the intent being clarified and what is already known.
struct Focus {
  std::string intent_name;
  SlotFills filled;
};

/// What the robot asked the keeper for.
struct PendingRequest {
  std::string intent_name;
  std::string item;
  SlotFills fills;
};

/// Renders prompts, calls the backend, and turns completions into typed
/// interpretations. A completion without a usable envelope is retried once
/// with an instruction to answer with only the JSON object.
class LanguageProcessor {
 public:
  explicit LanguageProcessor(CompletionBackend& backend) : backend_(&backend) {}

  CompletionBackend& backend() const { return *backend_; }

  /// With a focus the FillSlots prompt is used, otherwise DetectIntent.
  /// Fills are grounded against `grounding_text`, or `transcript` when empty.
  Interpretation detect_intent(std::string_view utterance, const Catalog& catalog,
                               std::string_view transcript, std::string_view grounding_text = {},
                               const std::optional<Focus>& focus = std::nullopt,
                               std::string_view interlocutor = "senior");

  ReplyClassified classify_keeper_reply(std::string_view reply, const PendingRequest& expected,
                                        std::string_view transcript);

  AdditionProposed derive_addition(std::string_view question,
                                   const std::optional<std::string>& current_intent,
                                   std::string_view item, const SlotFills& fills,
                                   const Catalog& catalog, std::string_view transcript);

  UtteranceGenerated generate_clarifying_question(const IntentSpec& intent,
                                                  std::string_view missing_slot,
                                                  std::string_view item, const SlotFills& fills,
                                                  std::string_view transcript);

  /// The returned text always names the item and every filled value.
  UtteranceGenerated generate_keeper_request(const PendingRequest& request,
                                             std::string_view transcript);

 private:
  template <typename Parse>
  auto complete_with_retry(TemplateId id, const Bindings& bindings, Parse&& parse)
      -> decltype(parse(nlohmann::json{}));

  CompletionBackend* backend_;
};

/// Appends `[speaker] Heard: text` unless that is already the speaker's latest
/// line, so the prompt always carries the utterance being interpreted.
std::string with_latest_heard(std::string_view transcript, std::string_view speaker,
                              std::string_view text);

}  // namespace carebot
