#include "carebot/intent_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

SlotSpec SlotSpec::make(std::string_view name, std::string description,
                        std::vector<std::string> options, bool required,
                        std::optional<std::string> clarifying_question) {
  SlotSpec slot;
  slot.name = normalize_name(name);
  slot.description = std::move(description);
  slot.options = fold_unique(options);
  slot.required = required;
  if (clarifying_question && !trim(*clarifying_question).empty()) {
    slot.clarifying_question = trim(*clarifying_question);
  }
  return slot;
}

std::optional<std::string> SlotSpec::canonical_option(std::string_view value) const {
  const auto folded = fold_value(value);
  for (const auto& option : options) {
    if (option == folded) return option;
  }
  return std::nullopt;
}

std::string_view to_string(Origin origin) {
  return origin == Origin::seeded ? "seeded" : "learned";
}

const SlotSpec* IntentSpec::find_slot(std::string_view slot_name) const {
  const auto key = normalize_name(slot_name);
  auto it = std::find_if(slots.begin(), slots.end(), [&](const SlotSpec& s) { return s.name == key; });
  return it == slots.end() ? nullptr : &*it;
}

std::vector<IntentSpec> Catalog::list_intents() const {
  std::vector<IntentSpec> out;
  out.reserve(intents_.size());
  for (const auto& [_, spec] : intents_) out.push_back(spec);
  std::sort(out.begin(), out.end(), [](const IntentSpec& a, const IntentSpec& b) {
    return std::tie(a.created_at, a.name) < std::tie(b.created_at, b.name);
  });
  return out;
}

const IntentSpec* Catalog::find(std::string_view intent_name) const {
  auto it = intents_.find(normalize_name(intent_name));
  return it == intents_.end() ? nullptr : &it->second;
}

IntentSpec& Catalog::find_mutable(std::string_view intent_name) {
  auto it = intents_.find(normalize_name(intent_name));
  if (it == intents_.end()) {
    throw Error(ErrorCode::UnknownIntent, "no intent named '" + std::string(intent_name) + "'");
  }
  return it->second;
}

std::uint64_t Catalog::register_intent(IntentSpec spec, std::string_view binding_task,
                                       const TaskExists& task_exists) {
  spec.name = normalize_name(spec.name);
  if (spec.name.empty()) throw Error(ErrorCode::InvalidArgument, "intent name is empty");
  if (intents_.contains(spec.name)) {
    throw Error(ErrorCode::DuplicateIntent, "intent '" + spec.name + "' already exists");
  }
  const auto task = normalize_name(binding_task);
  if (task.empty() || !task_exists || !task_exists(task)) {
    throw Error(ErrorCode::UnknownTask, "task '" + std::string(binding_task) + "' is not registered");
  }

  // Re-run slot normalization and merge same-named slots so that the
  // per-intent uniqueness invariant holds whatever the caller passed in.
  std::vector<SlotSpec> slots;
  for (auto& raw : spec.slots) {
    auto slot = SlotSpec::make(raw.name, raw.description, raw.options, raw.required,
                               raw.clarifying_question);
    if (slot.name.empty()) throw Error(ErrorCode::InvalidArgument, "slot name is empty");
    auto it = std::find_if(slots.begin(), slots.end(),
                           [&](const SlotSpec& s) { return s.name == slot.name; });
    if (it == slots.end()) {
      slots.push_back(std::move(slot));
    } else {
      auto merged = it->options;
      merged.insert(merged.end(), slot.options.begin(), slot.options.end());
      it->options = fold_unique(merged);
    }
  }
  spec.slots = std::move(slots);
  spec.created_at = next_seq_++;
  bindings_[spec.name] = TaskBinding{spec.name, task};
  const auto seq = spec.created_at;
  intents_.emplace(spec.name, std::move(spec));
  return seq;
}

IntentSpec Catalog::add_slot(std::string_view intent_name, SlotSpec slot) {
  auto& intent = find_mutable(intent_name);
  slot = SlotSpec::make(slot.name, slot.description, slot.options, slot.required,
                        slot.clarifying_question);
  if (slot.name.empty()) throw Error(ErrorCode::InvalidArgument, "slot name is empty");

  auto it = std::find_if(intent.slots.begin(), intent.slots.end(),
                         [&](const SlotSpec& s) { return s.name == slot.name; });
  if (it == intent.slots.end()) {
    intent.slots.push_back(std::move(slot));
  } else {
    auto merged = it->options;
    merged.insert(merged.end(), slot.options.begin(), slot.options.end());
    it->options = fold_unique(merged);
    if (!it->clarifying_question && slot.clarifying_question) {
      it->clarifying_question = slot.clarifying_question;
    }
  }
  return intent;
}

SlotSpec Catalog::set_slot_options(std::string_view intent_name, std::string_view slot_name,
                                   const std::vector<std::string>& options) {
  auto& intent = find_mutable(intent_name);
  const auto key = normalize_name(slot_name);
  auto it = std::find_if(intent.slots.begin(), intent.slots.end(),
                         [&](const SlotSpec& s) { return s.name == key; });
  if (it == intent.slots.end()) {
    throw Error(ErrorCode::UnknownSlot,
                "intent '" + intent.name + "' has no slot '" + std::string(slot_name) + "'");
  }
  it->options = fold_unique(options);
  return *it;
}

std::string Catalog::resolve_task(std::string_view intent_name) const {
  auto it = bindings_.find(normalize_name(intent_name));
  if (it == bindings_.end()) {
    throw Error(ErrorCode::NoBinding, "no task bound to intent '" + std::string(intent_name) + "'");
  }
  return it->second.task_name;
}

std::vector<TaskBinding> Catalog::bindings() const {
  std::vector<TaskBinding> out;
  for (const auto& [_, b] : bindings_) out.push_back(b);
  return out;
}

// --- persistence -----------------------------------------------------------

namespace {

json slot_to_json(const SlotSpec& slot) {
  json j = {{"name", slot.name},
            {"description", slot.description},
            {"options", slot.options},
            {"required", slot.required}};
  if (slot.clarifying_question) j["clarifying_question"] = *slot.clarifying_question;
  return j;
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptCatalog, why); }

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) corrupt(std::string("missing field '") + key + "'");
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) corrupt(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

std::uint64_t unsigned_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number_unsigned()) corrupt(std::string("field '") + key + "' is not an unsigned integer");
  return v.get<std::uint64_t>();
}

SlotSpec slot_from_json(const json& j) {
  SlotSpec slot;
  slot.name = string_field(j, "name");
  if (slot.name.empty() || normalize_name(slot.name) != slot.name) {
    corrupt("slot name '" + slot.name + "' is not normalized");
  }
  slot.description = string_field(j, "description");
  const auto& options = field(j, "options");
  if (!options.is_array()) corrupt("slot options must be an array");
  for (const auto& o : options) {
    if (!o.is_string()) corrupt("slot option is not a string");
    slot.options.push_back(o.get<std::string>());
  }
  if (fold_unique(slot.options) != slot.options) {
    corrupt("options of slot '" + slot.name + "' are not folded and unique");
  }
  const auto& required = field(j, "required");
  if (!required.is_boolean()) corrupt("slot 'required' must be a boolean");
  slot.required = required.get<bool>();
  if (j.contains("clarifying_question") && !j.at("clarifying_question").is_null()) {
    slot.clarifying_question = string_field(j, "clarifying_question");
  }
  return slot;
}

}  // namespace

json Catalog::to_json() const {
  json intents = json::array();
  for (const auto& spec : list_intents()) {
    json slots = json::array();
    for (const auto& s : spec.slots) slots.push_back(slot_to_json(s));
    intents.push_back({{"name", spec.name},
                       {"description", spec.description},
                       {"origin", to_string(spec.origin)},
                       {"created_at", spec.created_at},
                       {"slots", std::move(slots)}});
  }
  json bindings = json::array();
  for (const auto& b : this->bindings()) {
    bindings.push_back({{"intent_name", b.intent_name}, {"task_name", b.task_name}});
  }
  return {{"schema_version", kSchemaVersion},
          {"intents", std::move(intents)},
          {"bindings", std::move(bindings)},
          {"next_seq", next_seq_}};
}

std::string Catalog::to_document() const {
  return to_json().dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

Catalog Catalog::from_document(std::string_view text) {
  // The trailing newline is part of the format; a file cut anywhere,
  // including just before the final byte, is reported as corrupt.
  if (text.empty() || text.back() != '\n') corrupt("document is truncated (no trailing newline)");
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) corrupt("document is not a JSON object");

  const auto& version = field(doc, "schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    corrupt("unsupported schema_version");
  }

  Catalog catalog;
  catalog.next_seq_ = unsigned_field(doc, "next_seq");

  const auto& intents = field(doc, "intents");
  if (!intents.is_array()) corrupt("'intents' must be an array");
  for (const auto& j : intents) {
    IntentSpec spec;
    spec.name = string_field(j, "name");
    if (spec.name.empty() || normalize_name(spec.name) != spec.name) {
      corrupt("intent name '" + spec.name + "' is not normalized");
    }
    spec.description = string_field(j, "description");
    const auto origin = string_field(j, "origin");
    if (origin == "seeded") {
      spec.origin = Origin::seeded;
    } else if (origin == "learned") {
      spec.origin = Origin::learned;
    } else {
      corrupt("unknown origin '" + origin + "'");
    }
    spec.created_at = unsigned_field(j, "created_at");
    if (spec.created_at >= catalog.next_seq_) corrupt("created_at not below next_seq");
    const auto& slots = field(j, "slots");
    if (!slots.is_array()) corrupt("'slots' must be an array");
    std::set<std::string> slot_names;
    for (const auto& s : slots) {
      auto slot = slot_from_json(s);
      if (!slot_names.insert(slot.name).second) corrupt("duplicate slot '" + slot.name + "'");
      spec.slots.push_back(std::move(slot));
    }
    if (catalog.intents_.contains(spec.name)) corrupt("duplicate intent '" + spec.name + "'");
    catalog.intents_.emplace(spec.name, std::move(spec));
  }

  const auto& bindings = field(doc, "bindings");
  if (!bindings.is_array()) corrupt("'bindings' must be an array");
  for (const auto& j : bindings) {
    TaskBinding b{string_field(j, "intent_name"), string_field(j, "task_name")};
    if (!catalog.intents_.contains(b.intent_name)) {
      corrupt("binding refers to unknown intent '" + b.intent_name + "'");
    }
    if (b.task_name.empty()) corrupt("binding has empty task name");
    if (catalog.bindings_.contains(b.intent_name)) {
      corrupt("more than one binding for '" + b.intent_name + "'");
    }
    catalog.bindings_.emplace(b.intent_name, std::move(b));
  }
  return catalog;
}

void Catalog::save(const std::filesystem::path& path) const {
  const auto text = to_document();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot rename into " + path.string() + ": " + ec.message());
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_document(buf.str());
}

// --- CatalogStore ----------------------------------------------------------

CatalogStore::CatalogStore(Catalog initial, std::optional<std::filesystem::path> persist_path)
    : current_(std::make_shared<const Catalog>(std::move(initial))),
      persist_path_(std::move(persist_path)) {}

std::shared_ptr<const Catalog> CatalogStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void CatalogStore::publish(std::shared_ptr<Catalog> next) {
  std::lock_guard lock(snapshot_mutex_);
  if (!(*next == *current_)) dirty_ = true;
  current_ = std::move(next);
}

bool CatalogStore::dirty() const {
  std::lock_guard lock(snapshot_mutex_);
  return dirty_;
}

void CatalogStore::flush() {
  std::lock_guard write_lock(write_mutex_);
  std::shared_ptr<const Catalog> snap;
  {
    std::lock_guard lock(snapshot_mutex_);
    if (!dirty_ || !persist_path_) return;
    snap = current_;
  }
  snap->save(*persist_path_);
  std::lock_guard lock(snapshot_mutex_);
  if (current_ == snap) dirty_ = false;
}

}  // namespace carebot
