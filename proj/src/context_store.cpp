#include "carebot/context_store.hpp"

#include <array>
#include <ctime>
#include <sstream>
#include <utility>

#include "carebot/errors.hpp"

namespace carebot {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kActorNames = {"senior", "keeper", "robot", "system"};
constexpr std::array<std::string_view, 9> kKindNames = {
    "Heard",        "Said",          "TaskStarted",    "TaskStateChanged", "TaskCompleted",
    "IntentLearned", "SlotLearned",  "OptionsLearned", "ActionPerformed"};

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(millis));
  return out;
}

// Transcript lines must stay single-line whatever the payload holds.
std::string one_line(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

std::string_view to_string(Actor actor) { return kActorNames.at(static_cast<std::size_t>(actor)); }
std::string_view to_string(EventKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::optional<Actor> actor_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kActorNames.size(); ++i) {
    if (kActorNames[i] == s) return static_cast<Actor>(i);
  }
  return std::nullopt;
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

bool ContextEvent::same_as(const ContextEvent& other) const {
  return session == other.session && seq == other.seq && actor == other.actor &&
         kind == other.kind && payload == other.payload;
}

std::string primary_text(const ContextEvent& event) {
  if (auto it = event.payload.find("text"); it != event.payload.end()) return one_line(it->second);
  std::string out;
  for (const auto& [k, v] : event.payload) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v;
  }
  return one_line(out);
}

std::string render_transcript(std::span<const ContextEvent> events, std::size_t max_events) {
  const auto start = events.size() > max_events ? events.size() - max_events : 0;
  std::string out;
  for (auto i = start; i < events.size(); ++i) {
    if (i > start) out += '\n';
    const auto& e = events[i];
    out += "[";
    out += to_string(e.actor);
    out += "] ";
    out += to_string(e.kind);
    out += ": ";
    out += primary_text(e);
  }
  return out;
}

json to_json(const ContextEvent& event) {
  return {{"session", event.session},
          {"seq", event.seq},
          {"wall_time", event.wall_time},
          {"actor", to_string(event.actor)},
          {"kind", to_string(event.kind)},
          {"payload", event.payload}};
}

ContextEvent event_from_json(const json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::CorruptLog, why); };
  if (!j.is_object()) throw bad("event is not an object");
  ContextEvent e;
  if (!j.contains("seq") || !j.at("seq").is_number_unsigned()) throw bad("missing or invalid seq");
  e.seq = j.at("seq").get<std::uint64_t>();
  if (j.contains("session") && j.at("session").is_string()) e.session = j.at("session").get<std::string>();
  if (j.contains("wall_time") && j.at("wall_time").is_string()) {
    e.wall_time = j.at("wall_time").get<std::string>();
  }
  if (!j.contains("actor") || !j.at("actor").is_string()) throw bad("missing actor");
  auto actor = actor_from_string(j.at("actor").get<std::string>());
  if (!actor) throw bad("unknown actor");
  e.actor = *actor;
  if (!j.contains("kind") || !j.at("kind").is_string()) throw bad("missing kind");
  auto kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw bad("unknown kind");
  e.kind = *kind;
  if (j.contains("payload")) {
    const auto& p = j.at("payload");
    if (!p.is_object()) throw bad("payload is not an object");
    for (const auto& [k, v] : p.items()) {
      if (!v.is_string()) throw bad("payload value for '" + k + "' is not a string");
      e.payload.emplace(k, v.get<std::string>());
    }
  }
  return e;
}

std::string to_ndjson(std::span<const ContextEvent> events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<ContextEvent> parse_ndjson(std::string_view text) {
  std::vector<ContextEvent> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto j = json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::CorruptLog, where + "not valid JSON");
    try {
      out.push_back(event_from_json(j));
    } catch (const Error& e) {
      // Keep the reason, not the code prefix it already carries.
      std::string reason = e.what();
      if (const auto colon = reason.find(": "); colon != std::string::npos) reason.erase(0, colon + 2);
      throw Error(ErrorCode::CorruptLog, where + reason);
    }
  }
  return out;
}

// --- ContextStore ----------------------------------------------------------

SessionId ContextStore::create_session() {
  std::lock_guard lock(mutex_);
  SessionId id{"s" + std::to_string(next_session_++)};
  logs_.emplace(id, Log{});
  return id;
}

bool ContextStore::has_session(const SessionId& session) const {
  std::lock_guard lock(mutex_);
  return logs_.contains(session);
}

const ContextStore::Log& ContextStore::log_for(const SessionId& session) const {
  auto it = logs_.find(session);
  if (it == logs_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session.value + "'");
  return it->second;
}

ContextStore::Log& ContextStore::log_for(const SessionId& session) {
  return const_cast<Log&>(std::as_const(*this).log_for(session));
}

ContextEvent ContextStore::append(const SessionId& session, Actor actor, EventKind kind,
                                  Payload payload) {
  if (kind == EventKind::Heard || kind == EventKind::Said) {
    auto it = payload.find("text");
    if (it == payload.end() || it->second.empty()) {
      throw Error(ErrorCode::InvalidArgument, "Heard/Said events need non-empty text");
    }
  }
  ContextEvent event;
  {
    std::lock_guard lock(mutex_);
    auto& log = log_for(session);
    event.session = session.value;
    event.seq = log.events.size() + 1;
    event.wall_time = now_iso8601();
    event.actor = actor;
    event.kind = kind;
    event.payload = std::move(payload);
    log.events.push_back(event);
  }
  changed_.notify_all();
  return event;
}

std::vector<ContextEvent> ContextStore::events(const SessionId& session, std::uint64_t from_seq) const {
  std::lock_guard lock(mutex_);
  const auto& log = log_for(session);
  const auto start = from_seq <= 1 ? 0 : std::min<std::size_t>(from_seq - 1, log.events.size());
  return {log.events.begin() + static_cast<std::ptrdiff_t>(start), log.events.end()};
}

std::string ContextStore::transcript(const SessionId& session, std::size_t max_events) const {
  std::lock_guard lock(mutex_);
  return render_transcript(log_for(session).events, max_events);
}

std::uint64_t ContextStore::last_seq(const SessionId& session) const {
  std::lock_guard lock(mutex_);
  return log_for(session).events.size();
}

void ContextStore::close(const SessionId& session) {
  {
    std::lock_guard lock(mutex_);
    log_for(session).closed = true;
  }
  changed_.notify_all();
}

ContextStore::Batch ContextStore::wait_events(const SessionId& session, std::uint64_t from_seq,
                                              std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  const auto ready = [&] {
    const auto& log = log_for(session);
    return log.closed || log.events.size() >= std::max<std::uint64_t>(from_seq, 1);
  };
  changed_.wait_for(lock, timeout, ready);
  const auto& log = log_for(session);
  Batch batch;
  batch.closed = log.closed;
  const auto start = from_seq <= 1 ? 0 : std::min<std::size_t>(from_seq - 1, log.events.size());
  batch.events.assign(log.events.begin() + static_cast<std::ptrdiff_t>(start), log.events.end());
  return batch;
}

}  // namespace carebot
