#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace carebot {

struct SessionId {
  std::string value;

  friend auto operator<=>(const SessionId&, const SessionId&) = default;
};

enum class Actor { senior, keeper, robot, system };

enum class EventKind {
  Heard,
  Said,
  TaskStarted,
  TaskStateChanged,
  TaskCompleted,
  IntentLearned,
  SlotLearned,
  OptionsLearned,
  ActionPerformed,
};

std::string_view to_string(Actor actor);
std::string_view to_string(EventKind kind);
std::optional<Actor> actor_from_string(std::string_view s);
std::optional<EventKind> event_kind_from_string(std::string_view s);

using Payload = std::map<std::string, std::string>;

struct ContextEvent {
  std::string session;
  std::uint64_t seq = 0;
  std::string wall_time;  // informational; ordering is by seq
  Actor actor = Actor::system;
  EventKind kind = EventKind::Heard;
  Payload payload;

  /// Equality ignoring wall_time.
  bool same_as(const ContextEvent& other) const;
};

/// The line body used in transcripts: payload "text" when present,
/// otherwise the payload rendered as sorted "key=value" pairs.
std::string primary_text(const ContextEvent& event);

/// One line per event, newest last, keeping only the last `max_events`.
std::string render_transcript(std::span<const ContextEvent> events, std::size_t max_events);

nlohmann::json to_json(const ContextEvent& event);
ContextEvent event_from_json(const nlohmann::json& j);

/// Newline-delimited JSON export, one event per line.
std::string to_ndjson(std::span<const ContextEvent> events);
/// Throws CorruptLog naming the 1-based line number of the first bad line.
std::vector<ContextEvent> parse_ndjson(std::string_view text);

inline constexpr std::size_t kDefaultTranscriptLines = 40;

/// Append-only per-session event logs.
class ContextStore {
 public:
  struct Batch {
    std::vector<ContextEvent> events;
    bool closed = false;
  };

  SessionId create_session();

  bool has_session(const SessionId& session) const;

  ContextEvent append(const SessionId& session, Actor actor, EventKind kind, Payload payload);

  std::vector<ContextEvent> events(const SessionId& session, std::uint64_t from_seq = 1) const;

  std::string transcript(const SessionId& session,
                         std::size_t max_events = kDefaultTranscriptLines) const;

  /// Highest assigned seq, 0 for an empty log.
  std::uint64_t last_seq(const SessionId& session) const;

  /// Marks the log finished; waiters wake up and see `closed`.
  void close(const SessionId& session);

  /// Events with seq >= from_seq. Blocks up to `timeout` while there are none
  /// and the session is still open.
  Batch wait_events(const SessionId& session, std::uint64_t from_seq,
                    std::chrono::milliseconds timeout) const;

 private:
  struct Log {
    std::vector<ContextEvent> events;
    bool closed = false;
  };

  const Log& log_for(const SessionId& session) const;
  Log& log_for(const SessionId& session);

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<SessionId, Log> logs_;
  std::uint64_t next_session_ = 1;
};

}  // namespace carebot
