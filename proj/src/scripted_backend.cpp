#include "carebot/scripted_backend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kFillerWords = {
    "a",   "an",    "the",   "me",  "some",   "of",   "cup", "glass", "mug",
    "please", "bring", "get", "my", "to",    "for",  "with", "and",   "i",   "like", "want"};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

std::string first_line(const std::string& section) {
  for (auto line : split_lines(section)) {
    auto t = trim(line);
    if (!t.empty()) return t;
  }
  return {};
}

std::vector<std::string> split(std::string_view text, std::string_view sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(sep, pos);
    parts.emplace_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + sep.size();
  }
  return parts;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

PromptFields::KnownSlot parse_known_slot(std::string_view text) {
  PromptFields::KnownSlot slot;
  auto colon = text.find(": ");
  slot.name = trim(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    for (auto& o : split(text.substr(colon + 2), "|")) {
      if (auto t = trim(o); !t.empty()) slot.options.push_back(t);
    }
  }
  return slot;
}

std::vector<PromptFields::KnownIntent> parse_known_intents(const std::string& section) {
  std::vector<PromptFields::KnownIntent> out;
  for (auto raw : split_lines(section)) {
    auto line = trim(raw);
    if (line.rfind("- ", 0) != 0) continue;
    std::string_view body(line);
    body.remove_prefix(2);
    if (auto desc = body.find(" :: "); desc != std::string_view::npos) body = body.substr(0, desc);
    const auto open = body.find('(');
    const auto close = body.rfind(')');
    PromptFields::KnownIntent intent;
    intent.name = trim(body.substr(0, open));
    if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
      auto slots = body.substr(open + 1, close - open - 1);
      if (!trim(slots).empty()) {
        for (auto& s : split(slots, ", ")) intent.slots.push_back(parse_known_slot(s));
      }
    }
    if (!intent.name.empty()) out.push_back(std::move(intent));
  }
  return out;
}

std::vector<PromptFields::KnownSlot> parse_missing(const std::string& section,
                                                   std::map<std::string, std::string>& questions) {
  std::vector<PromptFields::KnownSlot> out;
  for (auto raw : split_lines(section)) {
    auto line = trim(raw);
    if (line.rfind("- ", 0) != 0) continue;
    std::string body = line.substr(2);
    std::string question;
    if (auto ask = body.find("; ask: "); ask != std::string::npos) {
      question = trim(body.substr(ask + 7));
      body.resize(ask);
    }
    PromptFields::KnownSlot slot;
    if (auto opts = body.find("; options: "); opts != std::string::npos) {
      for (auto& o : split(std::string_view(body).substr(opts + 11), "|")) {
        if (auto t = trim(o); !t.empty()) slot.options.push_back(t);
      }
      body.resize(opts);
    }
    slot.name = trim(body);
    if (!question.empty()) questions[slot.name] = question;
    out.push_back(std::move(slot));
  }
  return out;
}

std::map<std::string, std::string> parse_fills(const std::string& section) {
  std::map<std::string, std::string> out;
  for (auto raw : split_lines(section)) {
    auto line = trim(raw);
    if (line.rfind("- ", 0) != 0) continue;
    auto colon = line.find(": ", 2);
    if (colon == std::string::npos) continue;
    out[trim(line.substr(2, colon - 2))] = trim(line.substr(colon + 2));
  }
  return out;
}

std::string last_heard(const std::string& transcript, const std::string& speaker) {
  const std::string prefix = "[" + speaker + "] Heard: ";
  std::string found;
  for (auto line : split_lines(transcript)) {
    if (line.rfind(prefix, 0) == 0) found = trim(line.substr(prefix.size()));
  }
  return found;
}

std::string last_question(const std::string& utterance) {
  std::string question;
  std::size_t start = 0;
  for (std::size_t i = 0; i < utterance.size(); ++i) {
    const char c = utterance[i];
    if (c == '.' || c == '!' || c == '?') {
      if (c == '?') question = trim(std::string_view(utterance).substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  return question;
}

std::string item_modifier(const std::string& utterance, const std::string& item) {
  if (item.empty() || item.find(' ') != std::string::npos) return {};
  const auto words = words_of(utterance);
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i] == item && !kFillerWords.contains(words[i - 1])) return words[i - 1];
  }
  return {};
}

// Last word of the noun phrase after a request verb:
// "bring me a cup of green tea with sugar" -> "tea".
std::string requested_noun(const std::string& utterance) {
  static const std::set<std::string, std::less<>> verbs = {"bring", "get", "fetch", "want", "like", "need"};
  static const std::set<std::string, std::less<>> stops = {"with", "without", "and", "please", "from",
                                                           "to", "for", "now", "thanks", "thank"};
  const auto words = words_of(utterance);
  std::string noun;
  bool after_verb = false;
  for (const auto& w : words) {
    if (!after_verb) {
      after_verb = verbs.contains(w);
      continue;
    }
    if (stops.contains(w)) {
      if (!noun.empty()) break;
      continue;
    }
    if (kFillerWords.contains(w)) continue;
    noun = w;
  }
  return noun;
}

std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = text.find("${", pos);
    if (open == std::string::npos) break;
    auto close = text.find('}', open + 2);
    if (close == std::string::npos) break;
    out.append(text, pos, open - pos);
    auto it = vars.find(text.substr(open + 2, close - open - 2));
    if (it != vars.end()) out += it->second;
    pos = close + 1;
  }
  out.append(text, pos);
  return out;
}

json substitute_json(const json& value, const std::map<std::string, std::string>& vars) {
  if (value.is_string()) return substitute(value.get<std::string>(), vars);
  if (value.is_array()) {
    json out = json::array();
    for (const auto& v : value) out.push_back(substitute_json(v, vars));
    return out;
  }
  if (value.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : value.items()) out[substitute(k, vars)] = substitute_json(v, vars);
    return out;
  }
  return value;
}

// Fills for option words heard in the utterance. An option shared by several
// slots (yes/no) is only given to the slot currently being asked about.
void extract_option_fills(const PromptFields& fields, json& envelope) {
  std::string intent_name;
  if (envelope.contains("intent") && envelope["intent"].is_string()) {
    intent_name = envelope["intent"].get<std::string>();
  } else {
    intent_name = fields.value("focus_intent");
  }
  const auto* intent = fields.find_intent(intent_name);
  if (!intent) return;
  const auto& utterance = fields.value("utterance");
  const auto& focus_slot = fields.value("slot");

  std::map<std::string, int> option_owners;
  for (const auto& slot : intent->slots) {
    for (const auto& o : slot.options) ++option_owners[o];
  }
  if (!envelope.contains("slots") || !envelope["slots"].is_object()) envelope["slots"] = json::object();
  auto& slots = envelope["slots"];
  for (const auto& slot : intent->slots) {
    if (slots.contains(slot.name)) continue;
    std::vector<std::string> heard;
    for (const auto& o : slot.options) {
      if (!contains_word(utterance, o)) continue;
      if (option_owners[o] > 1 && slot.name != focus_slot) continue;
      heard.push_back(o);
    }
    if (heard.size() == 1) slots[slot.name] = heard.front();
  }
}

}  // namespace

const std::string& PromptFields::value(const std::string& name) const {
  static const std::string empty;
  auto it = values.find(name);
  return it == values.end() ? empty : it->second;
}

const PromptFields::KnownIntent* PromptFields::find_intent(std::string_view name) const {
  const auto key = normalize_name(name);
  for (const auto& intent : known_intents) {
    if (intent.name == key) return &intent;
  }
  return nullptr;
}

PromptFields parse_prompt(std::string_view prompt) {
  PromptFields fields;
  std::map<std::string, std::string> sections;
  std::string current;
  for (auto line : split_lines(prompt)) {
    if (line.rfind("TEMPLATE: ", 0) == 0 && !fields.template_id) {
      fields.template_id = template_id_from_string(trim(line.substr(10)));
      continue;
    }
    if (line.rfind("## ", 0) == 0) {
      current = trim(line.substr(3));
      sections[current];
      continue;
    }
    if (!current.empty()) {
      auto& s = sections[current];
      s.append(line);
      s.push_back('\n');
    }
  }

  auto& v = fields.values;
  if (fields.template_id) v["template"] = std::string(to_string(*fields.template_id));
  v["known_intents"] = trim(sections["Known intents"]);
  v["transcript"] = trim(sections["Conversation"]);
  v["interlocutor"] = first_line(sections["Speaker"]);
  v["focus_intent"] = first_line(sections["Focus intent"]);
  v["missing_slots"] = trim(sections["Missing slots"]);
  v["filled_slots"] = trim(sections["Filled slots"]);

  fields.known_intents = parse_known_intents(sections["Known intents"]);
  std::map<std::string, std::string> questions;
  fields.missing_slots = parse_missing(sections["Missing slots"], questions);
  fields.filled = parse_fills(sections["Filled slots"]);

  v["utterance"] = last_heard(v["transcript"], v["interlocutor"]);
  v["question"] = last_question(v["utterance"]);

  // The item being fetched: an explicit fill, else the bring_<item> focus.
  std::string item;
  if (auto it = fields.filled.find("item"); it != fields.filled.end()) item = it->second;
  const auto& focus = v["focus_intent"];
  if (item.empty() && focus.rfind("bring_", 0) == 0 && focus != "bring_goods") {
    item = focus.substr(6);
    std::replace(item.begin(), item.end(), '_', ' ');
  }

  std::string mentioned;
  std::size_t mentioned_len = 0;
  for (const auto& intent : fields.known_intents) {
    if (intent.name.rfind("bring_", 0) != 0 || intent.name == "bring_goods") continue;
    auto noun = intent.name.substr(6);
    std::replace(noun.begin(), noun.end(), '_', ' ');
    if (noun.size() > mentioned_len && contains_word(v["utterance"], noun)) {
      mentioned = intent.name;
      mentioned_len = noun.size();
    }
  }
  v["mentioned_intent"] = mentioned;
  if (item.empty() && !mentioned.empty()) {
    item = mentioned.substr(6);
    std::replace(item.begin(), item.end(), '_', ' ');
  }
  v["item"] = item;
  v["utterance_mentions_item"] = (!item.empty() && contains_word(v["utterance"], item)) ? "yes" : "no";
  v["item_modifier"] = item_modifier(v["utterance"], item);
  v["requested_noun"] = requested_noun(v["utterance"]);
  if (const auto* m = fields.find_intent(mentioned); m && !m->slots.empty()) v["mentioned_slot"] = m->slots.front().name;

  if (!fields.missing_slots.empty()) {
    const auto& first = fields.missing_slots.front();
    v["slot"] = first.name;
    v["slot_options"] = join_alternatives(first.options);
    if (auto q = questions.find(first.name); q != questions.end()) v["slot_question"] = q->second;
  }

  std::string values_text;
  std::string pairs_text;
  std::string constrained;
  for (const auto& [slot, value] : fields.filled) {
    if (slot == "item") continue;
    if (!values_text.empty()) {
      values_text += ", ";
      pairs_text += ", ";
    }
    values_text += value;
    pairs_text += slot + ": " + value;
    // The fill the utterance disagrees with is the one being constrained.
    if (constrained.empty() && !contains_word(v["utterance"], value)) constrained = slot;
  }
  if (constrained.empty()) {
    if (const auto* focus_intent = fields.find_intent(focus)) {
      for (const auto& s : focus_intent->slots) {
        if (!fields.filled.contains(s.name)) {
          constrained = s.name;
          break;
        }
      }
    }
  }
  if (constrained.empty()) {
    for (const auto& [slot, value] : fields.filled) {
      if (slot != "item") {
        constrained = slot;
        break;
      }
    }
  }
  v["filled_values"] = values_text;
  v["filled_pairs"] = pairs_text;
  v["constrained_slot"] = constrained.empty() ? "type" : constrained;
  return fields;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptedRule> rules) : rules_(std::move(rules)) {}

ScriptedBackend ScriptedBackend::from_json(const json& doc) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::InvalidConfig, "rule table: " + why); };
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("rules")) throw bad("missing 'rules'");
    list = &doc.at("rules");
  }
  if (!list->is_array()) throw bad("'rules' must be an array");

  std::vector<ScriptedRule> rules;
  for (const auto& j : *list) {
    if (!j.is_object()) throw bad("rule is not an object");
    ScriptedRule rule;
    rule.id = j.value("id", "rule" + std::to_string(rules.size() + 1));
    if (!j.contains("template") || !j.at("template").is_string()) throw bad(rule.id + ": missing template");
    auto id = template_id_from_string(j.at("template").get<std::string>());
    if (!id) throw bad(rule.id + ": unknown template");
    rule.template_id = *id;
    if (j.contains("when")) {
      if (!j.at("when").is_object()) throw bad(rule.id + ": 'when' must be an object");
      for (const auto& [field, pattern] : j.at("when").items()) {
        if (!pattern.is_string()) throw bad(rule.id + ": condition on '" + field + "' is not a string");
        try {
          rule.when.push_back({field, pattern.get<std::string>(),
                               std::regex(pattern.get<std::string>(),
                                          std::regex::ECMAScript | std::regex::icase)});
        } catch (const std::regex_error& e) {
          throw bad(rule.id + ": bad regex for '" + field + "': " + e.what());
        }
      }
    }
    if (!j.contains("envelope") || !j.at("envelope").is_object()) {
      throw bad(rule.id + ": 'envelope' must be an object");
    }
    rule.envelope = j.at("envelope");
    rule.keep_scanning = j.value("continue", false);
    rule.extract_options = j.value("extract_options", false);
    rules.push_back(std::move(rule));
  }
  return ScriptedBackend(std::move(rules));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read rule table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::InvalidConfig, "rule table is not valid JSON: " + path.string());
  return from_json(doc);
}

std::string ScriptedBackend::complete(const std::string& prompt) {
  const auto fields = parse_prompt(prompt);
  if (!fields.template_id) return "I cannot tell which task this prompt is for.";

  json slots = json::object();
  for (const auto& rule : rules_) {
    if (rule.template_id != *fields.template_id) continue;

    auto vars = fields.values;
    bool matched = true;
    for (const auto& cond : rule.when) {
      std::smatch m;
      const auto& subject = fields.value(cond.field);
      if (!std::regex_search(subject, m, cond.regex)) {
        matched = false;
        break;
      }
      for (std::size_t i = 1; i < m.size(); ++i) {
        vars[cond.field + "." + std::to_string(i)] = m[i].str();
      }
    }
    if (!matched) continue;

    auto envelope = substitute_json(rule.envelope, vars);
    if (rule.keep_scanning) {
      if (envelope.contains("slots") && envelope["slots"].is_object()) {
        for (const auto& [k, val] : envelope["slots"].items()) {
          if (!slots.contains(k)) slots[k] = val;
        }
      }
      continue;
    }
    if (!slots.empty() || envelope.contains("slots")) {
      auto merged = slots;
      if (envelope.contains("slots") && envelope["slots"].is_object()) {
        for (const auto& [k, val] : envelope["slots"].items()) merged[k] = val;
      }
      envelope["slots"] = std::move(merged);
    }
    if (rule.extract_options) extract_option_fills(fields, envelope);
    return envelope.dump(-1, ' ', false, json::error_handler_t::replace);
  }
  return "No scripted rule matches this prompt.";
}

}  // namespace carebot
