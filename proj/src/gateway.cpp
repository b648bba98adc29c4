#include "carebot/gateway.hpp"

#include <set>

#include "carebot/bus.hpp"
#include "carebot/errors.hpp"
#include "carebot/language_processor.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

constexpr std::string_view kNotUnderstood =
    "Sorry, I did not understand. I can bring you something from the kitchen.";
constexpr std::string_view kCannotDo = "Sorry, I do not know how to do that yet.";
constexpr std::string_view kBusy = "I am still working on your previous request.";

}  // namespace

std::string_view to_string(KeeperMode mode) {
  return mode == KeeperMode::scripted_keeper ? "scripted_keeper" : "human_keeper";
}

std::optional<KeeperMode> keeper_mode_from_string(std::string_view s) {
  if (s == "scripted_keeper") return KeeperMode::scripted_keeper;
  if (s == "human_keeper") return KeeperMode::human_keeper;
  return std::nullopt;
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::active: return "active";
    case SessionStatus::quiescent: return "quiescent";
    case SessionStatus::closed: return "closed";
  }
  return "active";
}

std::string_view to_string(Awaiting awaiting) {
  switch (awaiting) {
    case Awaiting::senior: return "senior";
    case Awaiting::keeper: return "keeper";
    case Awaiting::nothing: return "nothing";
  }
  return "nothing";
}

json SessionInfo::to_json() const {
  json j{{"session_id", id.value},
         {"mode", to_string(mode)},
         {"status", to_string(status)},
         {"backend", backend},
         {"robot_location", world.robot_location},
         {"tick", world.tick},
         {"awaiting", to_string(awaiting)},
         {"carried_item", nullptr},
         {"task", nullptr}};
  if (world.carried) j["carried_item"] = {{"item", world.carried->item}, {"attrs", world.carried->attrs}};
  if (task) {
    j["task"] = {{"instance", task->id},     {"task", task->task},
                 {"intent", task->intent_name}, {"item", task->item},
                 {"state", task->state},     {"slot_fills", task->slot_fills},
                 {"focus_slot", task->focus_slot ? json(*task->focus_slot) : json(nullptr)},
                 {"kitchen_trips", task->kitchen_trips}};
  }
  return j;
}

struct Gateway::Session {
  SessionId id;
  KeeperMode mode = KeeperMode::scripted_keeper;
  SessionStatus status = SessionStatus::quiescent;
  WorldConfig world;
  WorldState state;
  std::unique_ptr<CompletionBackend> backend;
  std::unique_ptr<LanguageProcessor> lp;
  std::optional<TaskInstance> instance;
  std::set<std::string> keeper_asked;
  Bus bus;
  mutable std::mutex mutex;

  Awaiting awaiting() const {
    if (!instance) return Awaiting::senior;
    if (instance->terminal()) return Awaiting::nothing;
    if (instance->state == "AwaitKeeperReply") return Awaiting::keeper;
    return Awaiting::senior;
  }
};

Gateway::Gateway(CatalogStore& catalog, WorldConfig default_world)
    : catalog_(&catalog), default_world_(std::move(default_world)), runtime_(catalog, context_) {
  runtime_.register_task(bring_goods_task_def());
}

Gateway::~Gateway() = default;

void Gateway::register_backend(std::string name, BackendFactory factory) {
  std::lock_guard lock(mutex_);
  backends_[std::move(name)] = std::move(factory);
}

bool Gateway::has_backend(std::string_view name) const {
  std::lock_guard lock(mutex_);
  return backends_.find(name) != backends_.end();
}

void Gateway::register_task(TaskDef def) { runtime_.register_task(std::move(def)); }

SessionId Gateway::create_session(const SessionOptions& options) {
  BackendFactory factory;
  {
    std::lock_guard lock(mutex_);
    auto it = backends_.find(options.backend);
    if (it == backends_.end()) {
      throw Error(ErrorCode::BackendUnavailable, "no backend named '" + options.backend + "'");
    }
    factory = it->second;
  }
  auto backend = factory();
  if (!backend) throw Error(ErrorCode::BackendUnavailable, "backend '" + options.backend + "' is not configured");

  auto s = std::make_shared<Session>();
  s->mode = options.mode;
  s->world = options.world ? *options.world : default_world_;
  s->state = WorldState{};
  s->backend = std::move(backend);
  s->lp = std::make_unique<LanguageProcessor>(*s->backend);
  s->id = context_.create_session();
  wire(*s);

  std::lock_guard lock(mutex_);
  sessions_[s->id] = s;
  return s->id;
}

std::shared_ptr<Gateway::Session> Gateway::find(const SessionId& session) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session.value + "'");
  return it->second;
}

void Gateway::wire(Session& s) {
  auto emit = [this, &s](const StepResult& step) {
    for (const auto& effect : step.effects) {
      if (const auto* action = std::get_if<Action>(&effect)) {
        s.bus.publish({std::string(topics::kActions), s.id, to_json(*action)});
      } else {
        const auto& say = std::get<SayTo>(effect);
        s.bus.publish({std::string(topics::kUtterancesOut), s.id,
                       {{"listener", to_string(say.listener)}, {"text", say.text}}});
      }
    }
  };
  auto say = [&s](Actor listener, std::string_view text) {
    s.bus.publish({std::string(topics::kUtterancesOut), s.id,
                   {{"listener", to_string(listener)}, {"text", std::string(text)}}});
  };

  s.bus.subscribe(topics::kUtterancesIn, [this, &s, emit, say](const BusMessage& m) {
    const auto actor = *actor_from_string(m.payload.at("actor").get<std::string>());
    const auto text = m.payload.at("text").get<std::string>();
    const auto heard = context_.append(s.id, actor, EventKind::Heard, {{"text", text}});

    if (s.instance && !s.instance->terminal()) {
      auto step = runtime_.advance(*s.instance, UtteranceArrived{actor, text}, *s.lp);
      if (step.ignored && actor == Actor::senior) say(Actor::senior, kBusy);
      emit(step);
      return;
    }
    if (actor != Actor::senior) return;

    const auto catalog = catalog_->snapshot();
    auto interpretation = s.lp->detect_intent(text, *catalog, context_.transcript(s.id), text);
    const auto* detected = std::get_if<IntentDetected>(&interpretation);
    if (!detected) {
      say(Actor::senior, kNotUnderstood);
      return;
    }
    TaskInstance instance;
    try {
      instance = runtime_.dispatch(detected->intent_name, detected->slot_fills, s.id, detected->dropped, heard.seq);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoBinding && e.code() != ErrorCode::UnknownTask) throw;
      say(Actor::senior, kCannotDo);
      return;
    }
    s.keeper_asked.clear();
    s.instance = std::move(instance);
    emit(runtime_.start(*s.instance, *s.lp));
  });

  s.bus.subscribe(topics::kUtterancesOut, [this, &s](const BusMessage& m) {
    const auto listener = m.payload.at("listener").get<std::string>();
    const auto text = m.payload.at("text").get<std::string>();
    context_.append(s.id, Actor::robot, EventKind::Said, {{"text", text}, {"to", listener}});
    if (listener != to_string(Actor::keeper) || s.mode != KeeperMode::scripted_keeper || !s.instance) return;

    std::string reply;
    try {
      auto r = keeper_reply(s.world, s.instance->item, s.instance->slot_fills, s.keeper_asked);
      if (r.asked) s.keeper_asked.insert(*r.asked);
      reply = r.text;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownItem) throw;
      reply = "Sorry, we have no " + s.instance->item + ".";
    }
    s.bus.publish({std::string(topics::kUtterancesIn), s.id, {{"actor", "keeper"}, {"text", reply}}});
  });

  s.bus.subscribe(topics::kActions, [this, &s, emit](const BusMessage& m) {
    const auto action = action_from_json(m.payload);
    ActionOutcome outcome;
    try {
      outcome = apply_action(s.world, s.state, action);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IllegalAction || !s.instance) throw;
      emit(runtime_.fail(*s.instance, e.what()));
      return;
    }
    s.state = outcome.state;
    Payload p{{"action", std::string(to_string(action.kind))},
              {"text", action.describe()},
              {"location", s.state.robot_location},
              {"ticks", std::to_string(outcome.ticks)},
              {"tick", std::to_string(s.state.tick)}};
    if (action.kind == Action::Kind::NavigateTo) p["target"] = action.location;
    if (action.kind == Action::Kind::PickUp) p["item"] = action.item;
    context_.append(s.id, Actor::robot, EventKind::ActionPerformed, std::move(p));
    s.bus.publish({std::string(topics::kActionsDone), s.id, m.payload});
  });

  s.bus.subscribe(topics::kActionsDone, [this, &s, emit](const BusMessage& m) {
    if (!s.instance) return;
    emit(runtime_.advance(*s.instance, ActionFinished{action_from_json(m.payload)}, *s.lp));
  });
}

std::vector<ContextEvent> Gateway::post_utterance(const SessionId& session, Actor actor, std::string_view text) {
  auto s = find(session);
  std::lock_guard lock(s->mutex);
  if (s->status == SessionStatus::closed) throw Error(ErrorCode::SessionClosed, "session '" + session.value + "' is closed");
  if (actor != Actor::senior && actor != Actor::keeper) {
    throw Error(ErrorCode::ActorNotAllowed, "only the senior or the keeper can speak");
  }
  if (actor == Actor::keeper && s->mode == KeeperMode::scripted_keeper) {
    throw Error(ErrorCode::ActorNotAllowed, "the keeper is simulated in this session");
  }
  const auto trimmed = trim(text);
  if (trimmed.empty()) throw Error(ErrorCode::InvalidArgument, "utterance is empty");

  const auto first = context_.last_seq(session) + 1;
  const auto saved_instance = s->instance;
  const auto saved_state = s->state;
  const auto saved_asked = s->keeper_asked;
  s->status = SessionStatus::active;
  try {
    s->bus.publish({std::string(topics::kUtterancesIn), s->id,
                    {{"actor", to_string(actor)}, {"text", trimmed}}});
    s->bus.drain();
  } catch (...) {
    s->bus.clear();
    s->instance = saved_instance;
    s->state = saved_state;
    s->keeper_asked = saved_asked;
    s->status = SessionStatus::quiescent;
    catalog_->flush();
    throw;
  }
  s->status = SessionStatus::quiescent;
  catalog_->flush();
  return context_.events(session, first);
}

std::vector<ContextEvent> Gateway::events(const SessionId& session, std::uint64_t from_seq) const {
  find(session);
  return context_.events(session, from_seq);
}

ContextStore::Batch Gateway::stream_events(const SessionId& session, std::uint64_t from_seq,
                                           std::chrono::milliseconds timeout) const {
  find(session);
  return context_.wait_events(session, from_seq, timeout);
}

SessionInfo Gateway::session_info(const SessionId& session) const {
  auto s = find(session);
  std::lock_guard lock(s->mutex);
  return {s->id, s->mode, s->status, s->backend->identity(), s->state, s->awaiting(), s->instance};
}

std::vector<SessionId> Gateway::sessions() const {
  std::lock_guard lock(mutex_);
  std::vector<SessionId> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

void Gateway::close_session(const SessionId& session) {
  auto s = find(session);
  std::lock_guard lock(s->mutex);
  if (s->status == SessionStatus::closed) return;
  s->status = SessionStatus::closed;
  context_.close(session);
}

std::string Gateway::catalog_document() const { return catalog_->snapshot()->to_document(); }

std::shared_ptr<const Catalog> Gateway::catalog_snapshot() const { return catalog_->snapshot(); }

}  // namespace carebot
