#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/action.hpp"
#include "carebot/context_store.hpp"
#include "carebot/intent_catalog.hpp"
#include "carebot/language_processor.hpp"

namespace carebot {

inline constexpr std::string_view kBringGoodsTask = "bring_goods_task";
inline constexpr std::string_view kDone = "Done";
inline constexpr std::string_view kFailed = "Failed";

struct Transition {
  std::string from;
  std::string trigger;
  std::string guard;
  std::string to;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TaskDef {
  std::string name;
  std::string initial_state;
  std::vector<std::string> states;
  std::vector<Transition> transitions;
  /// Executor that drives the machine. Only "bring_goods" exists.
  std::string behavior = "bring_goods";

  bool has_state(std::string_view state) const;
  const Transition* find(std::string_view from, std::string_view trigger) const;

  /// Throws InvalidDef.
  void validate() const;

  static TaskDef from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

TaskDef bring_goods_task_def();

/// Reads one def, a list of defs, or {"tasks": [...]}. Throws IoFailure or InvalidDef.
std::vector<TaskDef> load_task_defs(const std::filesystem::path& path);

struct TaskInstance {
  std::string id;
  std::string task;
  SessionId session;
  std::string intent_name;
  std::string item;
  SlotFills slot_fills;
  std::string state;
  std::optional<std::string> focus_slot;
  std::optional<std::string> pending_keeper_request;
  /// Grounding only looks at senior speech from this seq on.
  std::uint64_t origin_seq = 1;
  int clarifications = 0;
  int keeper_requests = 0;
  int kitchen_trips = 0;
  bool carrying = false;
  std::string failure;

  bool terminal() const { return state == kDone || state == kFailed; }
};

struct UtteranceArrived {
  Actor actor = Actor::senior;
  std::string text;
};

struct ActionFinished {
  Action action;
};

struct InterpretationReady {
  Interpretation interpretation;
};

using EngineEvent = std::variant<UtteranceArrived, ActionFinished, InterpretationReady>;

struct SayTo {
  Actor listener = Actor::senior;
  std::string text;

  friend bool operator==(const SayTo&, const SayTo&) = default;
};

using Effect = std::variant<Action, SayTo>;

struct StepResult {
  std::vector<Effect> effects;
  /// Context events the runtime appended while handling the event.
  std::vector<ContextEvent> events;
  bool ignored = false;
};

/// The task repository and the bring-goods executor.
class TaskRuntime {
 public:
  static constexpr int kMaxClarifications = 8;
  static constexpr int kMaxKeeperRequests = 8;

  TaskRuntime(CatalogStore& catalog, ContextStore& context);

  /// Throws DuplicateTask or InvalidDef.
  void register_task(TaskDef def);
  bool has_task(std::string_view name) const;
  const TaskDef& task(std::string_view name) const;
  TaskExists task_exists() const;

  /// Creates an instance in the task's initial state and logs TaskStarted.
  /// Throws NoBinding or UnknownTask.
  TaskInstance dispatch(std::string_view intent_name, const SlotFills& slot_fills,
                        const SessionId& session,
                        const std::vector<DroppedFill>& dropped = {},
                        std::uint64_t origin_seq = 1);

  /// Runs a freshly dispatched instance until it waits for an event.
  StepResult start(TaskInstance& instance, LanguageProcessor& lp);

  StepResult advance(TaskInstance& instance, const EngineEvent& event, LanguageProcessor& lp);

  /// Ends the instance in Failed, e.g. after an action could not be performed.
  StepResult fail(TaskInstance& instance, const std::string& reason);

  /// Required slots without a fill, in catalog order. Throws UnknownIntent.
  static std::vector<std::string> missing_slots(const TaskInstance& instance, const Catalog& catalog);

 private:
  struct Run;

  std::map<std::string, TaskDef, std::less<>> tasks_;
  CatalogStore* catalog_;
  ContextStore* context_;
  std::atomic<std::uint64_t> next_instance_{1};
};

}  // namespace carebot
