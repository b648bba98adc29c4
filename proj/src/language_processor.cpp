#include "carebot/language_processor.hpp"

#include <algorithm>

#include "carebot/envelope.hpp"
#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedCompletion, why); }

std::string one_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

std::optional<std::string> fill_value(const json& v) {
  if (v.is_string()) return fold_value(v.get<std::string>());
  if (v.is_boolean()) return std::string(v.get<bool>() ? "yes" : "no");
  if (v.is_number()) return v.dump();
  return std::nullopt;
}

SlotFills fills_from(const json& slots) {
  SlotFills out;
  if (!slots.is_object()) malformed("'slots' must be an object");
  for (const auto& [k, v] : slots.items()) {
    auto key = normalize_name(k);
    auto value = fill_value(v);
    if (key.empty() || !value) continue;
    out[key] = *value;
  }
  return out;
}

std::vector<std::string> string_list(const json& v, const char* what) {
  if (!v.is_array()) malformed(std::string("'") + what + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) malformed(std::string("'") + what + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string required_text(const json& env) {
  if (!env.contains("text") || !env.at("text").is_string()) malformed("missing 'text'");
  auto text = trim(env.at("text").get<std::string>());
  if (text.empty()) malformed("'text' is empty");
  return text;
}

SlotFills with_item(SlotFills fills, std::string_view item) {
  if (!item.empty() && !fills.contains("item")) fills["item"] = std::string(item);
  return fills;
}

// "with sugar" grounds sugar=yes and "without sugar" or "no sugar" grounds sugar=no.
bool said_as_yes_no(const SlotSpec& slot, const std::string& value, std::string_view transcript) {
  if (slot.options.size() != 2 || !slot.canonical_option("yes") || !slot.canonical_option("no")) return false;
  if (value == "yes") return contains_word(transcript, "with " + slot.name);
  if (value == "no") {
    return contains_word(transcript, "without " + slot.name) || contains_word(transcript, "no " + slot.name);
  }
  return false;
}

}  // namespace

GroundingResult grounding_filter(const SlotFills& fills, const IntentSpec& intent,
                                 std::string_view transcript) {
  GroundingResult result;
  for (const auto& [slot_name, raw] : fills) {
    const auto value = fold_value(raw);
    const auto* slot = intent.find_slot(slot_name);
    if (value.empty()) {
      result.dropped.push_back({slot_name, raw, "empty"});
    } else if (!slot) {
      result.dropped.push_back({slot_name, raw, "unknown slot"});
    } else if (!contains_folded(transcript, value) && !said_as_yes_no(*slot, value, transcript)) {
      result.dropped.push_back({slot_name, raw, "ungrounded"});
    } else if (slot->constrained()) {
      if (auto canonical = slot->canonical_option(value)) {
        result.kept[slot->name] = *canonical;
      } else {
        result.dropped.push_back({slot_name, raw, "not an option"});
      }
    } else {
      result.kept[slot->name] = value;
    }
  }
  return result;
}

std::string describe(const std::vector<DroppedFill>& dropped) {
  std::string out;
  for (const auto& d : dropped) {
    if (!out.empty()) out += "; ";
    out += d.slot + "=" + d.value + " (" + d.reason + ")";
  }
  return out;
}

std::string_view to_string(ReplyKind kind) {
  switch (kind) {
    case ReplyKind::answer: return "answer";
    case ReplyKind::unexpected_question: return "unexpected_question";
    case ReplyKind::availability_constraint: return "availability_constraint";
    case ReplyKind::confirmation: return "confirmation";
  }
  return "answer";
}

std::optional<ReplyKind> reply_kind_from_string(std::string_view s) {
  for (auto k : {ReplyKind::answer, ReplyKind::unexpected_question, ReplyKind::availability_constraint,
                 ReplyKind::confirmation}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string with_latest_heard(std::string_view transcript, std::string_view speaker,
                              std::string_view text) {
  const std::string prefix = "[" + std::string(speaker) + "] Heard: ";
  const std::string line = prefix + one_line(trim(text));
  std::string_view latest;
  std::size_t pos = 0;
  while (pos <= transcript.size()) {
    auto end = transcript.find('\n', pos);
    if (end == std::string_view::npos) end = transcript.size();
    auto l = transcript.substr(pos, end - pos);
    if (l.rfind(prefix, 0) == 0) latest = l;
    pos = end + 1;
  }
  if (latest == line) return std::string(transcript);
  std::string out(transcript);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += line;
  return out;
}

template <typename Parse>
auto LanguageProcessor::complete_with_retry(TemplateId id, const Bindings& bindings, Parse&& parse)
    -> decltype(parse(json{})) {
  const auto prompt = render(id, bindings);
  auto call = [&](const std::string& p) {
    try {
      return backend_->complete(p);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::BackendFailure, e.what());
    }
  };
  try {
    return parse(parse_envelope(call(prompt)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedCompletion) throw;
  }
  return parse(parse_envelope(call(prompt + std::string(kRetrySuffix))));
}

Interpretation LanguageProcessor::detect_intent(std::string_view utterance, const Catalog& catalog,
                                                std::string_view transcript,
                                                std::string_view grounding_text,
                                                const std::optional<Focus>& focus,
                                                std::string_view interlocutor) {
  if (trim(utterance).empty()) throw Error(ErrorCode::InvalidArgument, "utterance is empty");

  const auto heard = with_latest_heard(transcript, interlocutor, utterance);
  Bindings b{{"known_intents", list_known_intents(catalog)},
             {"transcript", heard},
             {"interlocutor", std::string(interlocutor)}};
  const IntentSpec* focus_spec = nullptr;
  if (focus) {
    focus_spec = catalog.find(focus->intent_name);
    std::vector<SlotSpec> missing;
    if (focus_spec) {
      for (const auto& s : focus_spec->slots) {
        if (!focus->filled.contains(s.name)) missing.push_back(s);
      }
    }
    b["focus_intent"] = normalize_name(focus->intent_name);
    b["missing_slots"] = list_slots(missing);
    b["filled_slots"] = list_fills(focus->filled);
  }

  const auto id = focus ? TemplateId::FillSlots : TemplateId::DetectIntent;
  auto [name, fills] = complete_with_retry(id, b, [&](const json& env) {
    std::string intent;
    if (env.contains("intent")) {
      if (!env.at("intent").is_string()) malformed("'intent' must be a string");
      intent = normalize_name(env.at("intent").get<std::string>());
    } else if (focus) {
      intent = normalize_name(focus->intent_name);
    } else {
      malformed("missing 'intent'");
    }
    if (focus && !env.contains("slots")) malformed("missing 'slots'");
    SlotFills fills = env.contains("slots") ? fills_from(env.at("slots")) : SlotFills{};
    return std::pair{intent, fills};
  });

  const auto* spec = catalog.find(name);
  if (name.empty() || name == "unknown" || !spec) return Unknown{};

  auto grounded = grounding_filter(fills, *spec, grounding_text.empty() ? std::string_view(heard) : grounding_text);
  return IntentDetected{spec->name, std::move(grounded.kept), std::move(grounded.dropped)};
}

ReplyClassified LanguageProcessor::classify_keeper_reply(std::string_view reply,
                                                         const PendingRequest& expected,
                                                         std::string_view transcript) {
  if (trim(reply).empty()) throw Error(ErrorCode::InvalidArgument, "reply is empty");
  Bindings b{{"transcript", with_latest_heard(transcript, "keeper", reply)},
             {"interlocutor", "keeper"},
             {"focus_intent", expected.intent_name},
             {"filled_slots", list_fills(with_item(expected.fills, expected.item))}};
  return complete_with_retry(TemplateId::ClassifyReply, b, [&](const json& env) {
    if (!env.contains("kind") || !env.at("kind").is_string()) malformed("missing 'kind'");
    auto kind = reply_kind_from_string(env.at("kind").get<std::string>());
    if (!kind) malformed("unknown reply kind '" + env.at("kind").get<std::string>() + "'");
    ReplyClassified out{*kind, std::nullopt};
    if (env.contains("question") && env.at("question").is_string() &&
        !trim(env.at("question").get<std::string>()).empty()) {
      out.question_text = trim(env.at("question").get<std::string>());
    }
    if (*kind == ReplyKind::unexpected_question && !out.question_text) out.question_text = trim(reply);
    return out;
  });
}

AdditionProposed LanguageProcessor::derive_addition(std::string_view question,
                                                    const std::optional<std::string>& current_intent,
                                                    std::string_view item, const SlotFills& fills,
                                                    const Catalog& catalog,
                                                    std::string_view transcript) {
  Bindings b{{"known_intents", list_known_intents(catalog)},
             {"transcript", with_latest_heard(transcript, "keeper", question)},
             {"interlocutor", "keeper"},
             {"focus_intent", current_intent.value_or("")},
             {"filled_slots", list_fills(with_item(fills, item))}};
  return complete_with_retry(TemplateId::DeriveAddition, b, [&](const json& env) {
    if (!env.contains("intent") || !env.at("intent").is_string()) malformed("missing 'intent'");
    AdditionProposed out;
    out.intent_name = normalize_name(env.at("intent").get<std::string>());
    if (out.intent_name.empty()) malformed("'intent' is empty");
    if (!env.contains("slot") || !env.at("slot").is_object()) malformed("missing 'slot'");
    const auto& slot = env.at("slot");
    if (!slot.contains("name") || !slot.at("name").is_string()) malformed("slot has no name");
    std::vector<std::string> slot_options;
    if (slot.contains("options")) slot_options = string_list(slot.at("options"), "slot.options");
    std::optional<std::string> ask;
    if (slot.contains("question") && slot.at("question").is_string()) {
      ask = slot.at("question").get<std::string>();
    }
    out.slot = SlotSpec::make(slot.at("name").get<std::string>(),
                              slot.value("description", std::string{}), slot_options, true, ask);
    if (out.slot.name.empty()) malformed("slot name is empty");
    if (env.contains("options") && !env.at("options").is_null()) {
      out.options = fold_unique(string_list(env.at("options"), "options"));
    }
    return out;
  });
}

UtteranceGenerated LanguageProcessor::generate_clarifying_question(const IntentSpec& intent,
                                                                   std::string_view missing_slot,
                                                                   std::string_view item,
                                                                   const SlotFills& fills,
                                                                   std::string_view transcript) {
  const auto* target = intent.find_slot(missing_slot);
  if (!target) {
    throw Error(ErrorCode::UnknownSlot, "intent '" + intent.name + "' has no slot '" +
                                            std::string(missing_slot) + "'");
  }
  if (fills.contains(target->name)) {
    throw Error(ErrorCode::InvalidArgument, "slot '" + target->name + "' is already filled");
  }
  std::vector<SlotSpec> missing{*target};
  for (const auto& s : intent.slots) {
    if (s.name != target->name && !fills.contains(s.name)) missing.push_back(s);
  }
  Bindings b{{"transcript", std::string(transcript)},
             {"interlocutor", "senior"},
             {"focus_intent", intent.name},
             {"missing_slots", list_slots(missing)},
             {"filled_slots", list_fills(with_item(fills, item))}};
  return complete_with_retry(TemplateId::GenClarifyQuestion, b,
                             [](const json& env) { return UtteranceGenerated{required_text(env)}; });
}

UtteranceGenerated LanguageProcessor::generate_keeper_request(const PendingRequest& request,
                                                              std::string_view transcript) {
  const auto fills = with_item(request.fills, request.item);
  Bindings b{{"transcript", std::string(transcript)},
             {"interlocutor", "keeper"},
             {"focus_intent", request.intent_name},
             {"filled_slots", list_fills(fills)}};
  auto out = complete_with_retry(TemplateId::GenKeeperRequest, b,
                                 [](const json& env) { return UtteranceGenerated{required_text(env)}; });

  // A request that leaves out a value would make the keeper guess.
  std::string missing;
  for (const auto& [slot, value] : fills) {
    if (contains_folded(out.text, value)) continue;
    if (!missing.empty()) missing += ", ";
    missing += slot + ": " + value;
  }
  if (!missing.empty()) out.text += " (" + missing + ")";
  return out;
}

}  // namespace carebot
