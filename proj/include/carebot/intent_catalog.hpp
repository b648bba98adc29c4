#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

namespace carebot {

/// One parameter of an intent. An empty option list means any value is accepted.
struct SlotSpec {
  std::string name;
  std::string description;
  std::vector<std::string> options;
  bool required = true;
  std::optional<std::string> clarifying_question;

  /// Builds a slot with a normalized name and folded, de-duplicated options.
  static SlotSpec make(std::string_view name, std::string description = {},
                       std::vector<std::string> options = {}, bool required = true,
                       std::optional<std::string> clarifying_question = std::nullopt);

  bool constrained() const { return !options.empty(); }

  /// Stored spelling of the option matching `value` case-insensitively.
  std::optional<std::string> canonical_option(std::string_view value) const;

  friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

enum class Origin { seeded, learned };

std::string_view to_string(Origin origin);

struct IntentSpec {
  std::string name;
  std::string description;
  std::vector<SlotSpec> slots;
  Origin origin = Origin::learned;
  std::uint64_t created_at = 0;

  const SlotSpec* find_slot(std::string_view slot_name) const;

  friend bool operator==(const IntentSpec&, const IntentSpec&) = default;
};

struct TaskBinding {
  std::string intent_name;
  std::string task_name;

  friend bool operator==(const TaskBinding&, const TaskBinding&) = default;
};

/// Answers whether a task name is registered with the task runtime.
using TaskExists = std::function<bool(std::string_view)>;

/// Known intents, their slots and the intent -> task mapping. A plain value:
/// copies are snapshots. Learning is additive; nothing here removes entries.
class Catalog {
 public:
  static constexpr int kSchemaVersion = 1;

  std::vector<IntentSpec> list_intents() const;
  const IntentSpec* find(std::string_view intent_name) const;
  bool contains(std::string_view intent_name) const { return find(intent_name) != nullptr; }

  /// Returns the creation sequence number assigned to the intent.
  std::uint64_t register_intent(IntentSpec spec, std::string_view binding_task,
                                const TaskExists& task_exists);

  /// Appends the slot, or merges options into an existing slot of the same name.
  IntentSpec add_slot(std::string_view intent_name, SlotSpec slot);

  /// Replaces the options; an empty set makes the slot unconstrained.
  SlotSpec set_slot_options(std::string_view intent_name, std::string_view slot_name,
                            const std::vector<std::string>& options);

  std::string resolve_task(std::string_view intent_name) const;

  std::vector<TaskBinding> bindings() const;
  std::uint64_t next_seq() const { return next_seq_; }

  nlohmann::json to_json() const;
  /// Canonical document: sorted keys, two-space indent, trailing newline.
  std::string to_document() const;

  /// Parses and validates a document; throws CorruptCatalog on any defect.
  static Catalog from_document(std::string_view text);

  void save(const std::filesystem::path& path) const;
  static Catalog load(const std::filesystem::path& path);

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  IntentSpec& find_mutable(std::string_view intent_name);

  std::map<std::string, IntentSpec> intents_;
  std::map<std::string, TaskBinding> bindings_;
  std::uint64_t next_seq_ = 1;
};

/// Single writer around a Catalog. Readers take immutable snapshots; each
/// mutation runs on a private copy that is published only if it succeeds.
class CatalogStore {
 public:
  explicit CatalogStore(Catalog initial = {},
                        std::optional<std::filesystem::path> persist_path = std::nullopt);

  std::shared_ptr<const Catalog> snapshot() const;

  template <typename Fn>
  auto mutate(Fn&& fn) {
    std::lock_guard lock(write_mutex_);
    auto working = std::make_shared<Catalog>(*snapshot());
    if constexpr (std::is_void_v<decltype(fn(*working))>) {
      fn(*working);
      publish(std::move(working));
    } else {
      auto result = fn(*working);
      publish(std::move(working));
      return result;
    }
  }

  bool dirty() const;
  /// Saves to the persist path when there are unsaved mutations.
  void flush();

  const std::optional<std::filesystem::path>& persist_path() const { return persist_path_; }

 private:
  void publish(std::shared_ptr<Catalog> next);

  mutable std::mutex snapshot_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const Catalog> current_;
  std::optional<std::filesystem::path> persist_path_;
  bool dirty_ = false;
};

}  // namespace carebot
