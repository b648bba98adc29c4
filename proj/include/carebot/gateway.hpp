#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/completion_backend.hpp"
#include "carebot/context_store.hpp"
#include "carebot/intent_catalog.hpp"
#include "carebot/task_runtime.hpp"
#include "carebot/world_sim.hpp"

namespace carebot {

enum class KeeperMode { scripted_keeper, human_keeper };
enum class SessionStatus { active, quiescent, closed };
enum class Awaiting { senior, keeper, nothing };

std::string_view to_string(KeeperMode mode);
std::optional<KeeperMode> keeper_mode_from_string(std::string_view s);
std::string_view to_string(SessionStatus status);
std::string_view to_string(Awaiting awaiting);

struct SessionOptions {
  KeeperMode mode = KeeperMode::scripted_keeper;
  std::string backend = "scripted";
  /// Replaces the gateway's default world for this session.
  std::optional<WorldConfig> world;
};

struct SessionInfo {
  SessionId id;
  KeeperMode mode = KeeperMode::scripted_keeper;
  SessionStatus status = SessionStatus::quiescent;
  std::string backend;
  WorldState world;
  Awaiting awaiting = Awaiting::senior;
  std::optional<TaskInstance> task;

  nlohmann::json to_json() const;
};

using BackendFactory = std::function<std::unique_ptr<CompletionBackend>()>;

/// Sessions, the per-session bus, and the wiring between language processor,
/// task runtime and simulated world. Each post is processed to quiescence
/// before it returns; different sessions run independently.
class Gateway {
 public:
  Gateway(CatalogStore& catalog, WorldConfig default_world);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void register_backend(std::string name, BackendFactory factory);
  bool has_backend(std::string_view name) const;
  /// Throws DuplicateTask or InvalidDef.
  void register_task(TaskDef def);

  /// Throws BackendUnavailable for an unknown or unusable backend.
  SessionId create_session(const SessionOptions& options = {});

  /// Returns every event appended while processing the utterance.
  /// Throws UnknownSession, SessionClosed, ActorNotAllowed, InvalidArgument,
  /// and BackendFailure or MalformedCompletion. On those the session's task,
  /// world and status are restored; events already logged and anything the
  /// catalog learned during the step are kept.
  std::vector<ContextEvent> post_utterance(const SessionId& session, Actor actor, std::string_view text);

  std::vector<ContextEvent> events(const SessionId& session, std::uint64_t from_seq = 1) const;

  /// Events with seq >= from_seq, waiting up to `timeout` for new ones.
  ContextStore::Batch stream_events(const SessionId& session, std::uint64_t from_seq,
                                    std::chrono::milliseconds timeout) const;

  SessionInfo session_info(const SessionId& session) const;
  std::vector<SessionId> sessions() const;
  void close_session(const SessionId& session);

  /// Same document as the catalog persistence file.
  std::string catalog_document() const;
  std::shared_ptr<const Catalog> catalog_snapshot() const;

  ContextStore& context() { return context_; }
  TaskRuntime& runtime() { return runtime_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const SessionId& session) const;
  void wire(Session& s);

  CatalogStore* catalog_;
  WorldConfig default_world_;
  ContextStore context_;
  TaskRuntime runtime_;

  mutable std::mutex mutex_;
  std::map<std::string, BackendFactory, std::less<>> backends_;
  std::map<SessionId, std::shared_ptr<Session>> sessions_;
};

}  // namespace carebot
