#include "carebot/task_runtime.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

[[noreturn]] void invalid_def(const std::string& why) { throw Error(ErrorCode::InvalidDef, why); }

std::string render_fills(const SlotFills& fills) {
  std::string out;
  for (const auto& [k, v] : fills) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v;
  }
  return out;
}

std::string item_of(std::string_view intent_name, const SlotFills& fills) {
  if (auto it = fills.find("item"); it != fills.end()) return it->second;
  std::string item(intent_name);
  if (item.rfind("bring_", 0) == 0) item.erase(0, 6);
  std::replace(item.begin(), item.end(), '_', ' ');
  return item;
}

}  // namespace

bool TaskDef::has_state(std::string_view state) const {
  return std::find(states.begin(), states.end(), state) != states.end();
}

const Transition* TaskDef::find(std::string_view from, std::string_view trigger) const {
  for (const auto& t : transitions) {
    if (t.from == from && t.trigger == trigger) return &t;
  }
  return nullptr;
}

void TaskDef::validate() const {
  if (name.empty()) invalid_def("task has no name");
  if (states.empty()) invalid_def(name + ": no states");
  std::set<std::string> seen;
  for (const auto& s : states) {
    if (s.empty()) invalid_def(name + ": empty state name");
    if (!seen.insert(s).second) invalid_def(name + ": duplicate state " + s);
  }
  if (!has_state(initial_state)) invalid_def(name + ": initial state '" + initial_state + "' is not a state");
  if (!has_state(kDone) || !has_state(kFailed)) invalid_def(name + ": needs the states Done and Failed");
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& t : transitions) {
    if (!has_state(t.from) || !has_state(t.to)) {
      invalid_def(name + ": transition " + t.from + " -> " + t.to + " uses an unknown state");
    }
    if (t.trigger.empty()) invalid_def(name + ": transition from " + t.from + " has no trigger");
    if (t.from == kDone || t.from == kFailed) invalid_def(name + ": transition out of terminal state " + t.from);
    if (!keys.insert({t.from, t.trigger}).second) {
      invalid_def(name + ": two transitions from " + t.from + " on " + t.trigger);
    }
  }
  if (behavior != "bring_goods") invalid_def(name + ": unknown behavior '" + behavior + "'");
  if (initial_state != "CheckSlots") invalid_def(name + ": bring_goods tasks start in CheckSlots");
}

TaskDef TaskDef::from_json(const json& j) {
  if (!j.is_object()) invalid_def("task definition must be an object");
  TaskDef def;
  try {
    def.name = j.at("name").get<std::string>();
    def.initial_state = j.at("initial_state").get<std::string>();
    def.states = j.at("states").get<std::vector<std::string>>();
    for (const auto& t : j.at("transitions")) {
      def.transitions.push_back({t.at("from").get<std::string>(), t.at("trigger").get<std::string>(),
                                 t.value("guard", std::string{}), t.at("to").get<std::string>()});
    }
    def.behavior = j.value("behavior", std::string("bring_goods"));
  } catch (const json::exception& e) {
    invalid_def(std::string("malformed task definition: ") + e.what());
  }
  def.validate();
  return def;
}

json TaskDef::to_json() const {
  json ts = json::array();
  for (const auto& t : transitions) {
    ts.push_back({{"from", t.from}, {"trigger", t.trigger}, {"guard", t.guard}, {"to", t.to}});
  }
  return {{"name", name}, {"initial_state", initial_state}, {"states", states},
          {"transitions", ts}, {"behavior", behavior}};
}

TaskDef bring_goods_task_def() {
  TaskDef def;
  def.name = std::string(kBringGoodsTask);
  def.initial_state = "CheckSlots";
  def.states = {"CheckSlots",   "AskSeniorClarification", "NavigateToKitchen", "RequestItem",
                "AwaitKeeperReply", "ReceiveItem",        "LearnAddition",     "LearnOptions",
                "NavigateToSenior", "Deliver",            "Done",              "Failed"};
  def.transitions = {
      {"CheckSlots", "slots_missing", "a required slot has no value", "AskSeniorClarification"},
      {"CheckSlots", "slots_complete", "every required slot is filled", "NavigateToKitchen"},
      {"CheckSlots", "clarification_cap", "too many clarification questions", "Failed"},
      {"AskSeniorClarification", "senior_reply", "the senior answered", "CheckSlots"},
      {"NavigateToKitchen", "arrived", "reached the kitchen", "RequestItem"},
      {"RequestItem", "request_sent", "asked the keeper", "AwaitKeeperReply"},
      {"RequestItem", "keeper_request_cap", "too many requests to the keeper", "Failed"},
      {"AwaitKeeperReply", "confirmation", "the keeper hands the item over", "ReceiveItem"},
      {"AwaitKeeperReply", "availability_constraint", "only some variants exist", "LearnOptions"},
      {"AwaitKeeperReply", "unexpected_question", "the keeper asked something new", "LearnAddition"},
      {"AwaitKeeperReply", "answer", "any other reply", "RequestItem"},
      {"ReceiveItem", "picked_up", "the item is carried", "NavigateToSenior"},
      {"LearnAddition", "learned", "the catalog grew and a slot is missing", "NavigateToSenior"},
      {"LearnAddition", "learned_nothing_missing", "the catalog grew, nothing is missing", "RequestItem"},
      {"LearnAddition", "mutation_failed", "the catalog rejected the addition", "Failed"},
      {"LearnOptions", "choice_required", "the senior has to choose", "NavigateToSenior"},
      {"LearnOptions", "no_choice_required", "the request fits the options", "RequestItem"},
      {"LearnOptions", "unavailable", "no variant is available", "Failed"},
      {"LearnOptions", "mutation_failed", "the catalog rejected the options", "Failed"},
      {"NavigateToSenior", "arrived_with_item", "back with the item", "Deliver"},
      {"NavigateToSenior", "arrived_slots_missing", "back to ask the senior", "AskSeniorClarification"},
      {"NavigateToSenior", "arrived_slots_complete", "back, nothing to ask", "CheckSlots"},
      {"NavigateToSenior", "clarification_cap", "too many clarification questions", "Failed"},
      {"Deliver", "delivered", "the senior has the item", "Done"},
  };
  for (const auto& s : def.states) {
    if (s != kDone && s != kFailed) def.transitions.push_back({s, "fault", "unrecoverable error", "Failed"});
  }
  return def;
}

std::vector<TaskDef> load_task_defs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read task definitions " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) invalid_def("task definitions are not valid JSON: " + path.string());
  const json* list = &doc;
  if (doc.is_object() && doc.contains("tasks")) list = &doc.at("tasks");
  std::vector<TaskDef> defs;
  if (list->is_array()) {
    for (const auto& j : *list) defs.push_back(TaskDef::from_json(j));
  } else {
    defs.push_back(TaskDef::from_json(*list));
  }
  return defs;
}

// One event's worth of work on one instance.
struct TaskRuntime::Run {
  TaskRuntime& rt;
  TaskInstance& inst;
  LanguageProcessor* lp;
  StepResult result;

  const TaskDef& def() const { return rt.task(inst.task); }
  std::shared_ptr<const Catalog> catalog() const { return rt.catalog_->snapshot(); }
  std::string transcript() const { return rt.context_->transcript(inst.session); }

  std::string senior_speech() const {
    std::string out;
    for (const auto& e : rt.context_->events(inst.session, inst.origin_seq)) {
      if (e.actor == Actor::senior && e.kind == EventKind::Heard) {
        if (!out.empty()) out += '\n';
        out += primary_text(e);
      }
    }
    return out;
  }

  void log(Actor actor, EventKind kind, Payload payload) {
    result.events.push_back(rt.context_->append(inst.session, actor, kind, std::move(payload)));
  }

  void move(std::string_view trigger, Payload extra = {}) {
    const auto* t = def().find(inst.state, trigger);
    if (!t) {
      throw Error(ErrorCode::IllegalTransition,
                  inst.task + " has no transition from " + inst.state + " on " + std::string(trigger));
    }
    const auto from = inst.state;
    inst.state = t->to;
    extra["instance"] = inst.id;
    extra["from"] = from;
    extra["to"] = t->to;
    extra["trigger"] = std::string(trigger);
    extra["text"] = from + " -> " + t->to + " (" + std::string(trigger) + ")";
    log(Actor::system, EventKind::TaskStateChanged, std::move(extra));
    if (inst.state == kDone) complete("done", "");
  }

  void complete(const std::string& outcome, const std::string& reason) {
    Payload p{{"instance", inst.id}, {"intent", inst.intent_name}, {"item", inst.item}, {"outcome", outcome}};
    std::string text = inst.intent_name + " " + outcome;
    if (!reason.empty()) {
      p["reason"] = reason;
      text += ": " + reason;
    }
    p["text"] = text;
    log(Actor::system, EventKind::TaskCompleted, std::move(p));
  }

  void fail(std::string_view trigger, const std::string& reason) {
    inst.failure = reason;
    if (def().find(inst.state, trigger)) {
      move(trigger, {{"reason", reason}});
    } else {
      // Not in the definition: the instance still must not linger.
      const auto from = inst.state;
      inst.state = std::string(kFailed);
      log(Actor::system, EventKind::TaskStateChanged,
          {{"instance", inst.id}, {"from", from}, {"to", inst.state}, {"trigger", std::string(trigger)},
           {"reason", reason}, {"text", from + " -> Failed (" + std::string(trigger) + ")"}});
    }
    complete("failed", reason);
    say(Actor::senior, "I am sorry, I could not bring you " + inst.item + ".");
  }

  void say(Actor listener, std::string text) { result.effects.emplace_back(SayTo{listener, std::move(text)}); }
  void act(Action a) { result.effects.emplace_back(std::move(a)); }

  std::vector<std::string> missing() const { return missing_slots(inst, *catalog()); }

  // --- automatic states ---------------------------------------------------

  void check_slots() {
    if (missing().empty()) {
      move("slots_complete");
      act(Action::navigate_to(kKitchen));
    } else {
      ask_senior("slots_missing");
    }
  }

  void ask_senior(std::string_view trigger) {
    if (inst.clarifications >= kMaxClarifications) {
      fail("clarification_cap", "asked the senior " + std::to_string(inst.clarifications) + " times");
      return;
    }
    const auto cat = catalog();
    const auto slots = missing_slots(inst, *cat);
    const auto* spec = cat->find(inst.intent_name);
    auto question = lp->generate_clarifying_question(*spec, slots.front(), inst.item, inst.slot_fills, transcript());
    move(trigger, {{"slot", slots.front()}});
    inst.focus_slot = slots.front();
    ++inst.clarifications;
    say(Actor::senior, std::move(question.text));
  }

  void request_item() {
    if (inst.keeper_requests >= kMaxKeeperRequests) {
      fail("keeper_request_cap", "asked the keeper " + std::to_string(inst.keeper_requests) + " times");
      return;
    }
    auto request = lp->generate_keeper_request({inst.intent_name, inst.item, inst.slot_fills}, transcript());
    inst.pending_keeper_request = request.text;
    ++inst.keeper_requests;
    move("request_sent");
    say(Actor::keeper, std::move(request.text));
  }

  void after_learning(std::string_view missing_trigger, std::string_view complete_trigger) {
    if (missing().empty()) {
      move(complete_trigger);
      request_item();
    } else {
      move(missing_trigger);
      act(Action::navigate_to(kSeniorRoom));
    }
  }

  // --- event handlers -----------------------------------------------------

  void on_senior_reply(const Interpretation& interpretation) {
    const auto cat = catalog();
    const auto* spec = cat->find(inst.intent_name);
    if (!spec) throw Error(ErrorCode::UnknownIntent, "intent '" + inst.intent_name + "' vanished");
    Payload extra;
    if (const auto* detected = std::get_if<IntentDetected>(&interpretation)) {
      // Fills detected under another intent are grounded again against ours.
      auto grounded = grounding_filter(detected->slot_fills, *spec, senior_speech());
      for (auto& [k, v] : grounded.kept) inst.slot_fills[k] = v;
      auto dropped = detected->dropped;
      dropped.insert(dropped.end(), grounded.dropped.begin(), grounded.dropped.end());
      extra["filled"] = render_fills(grounded.kept);
      if (!dropped.empty()) extra["dropped"] = describe(dropped);
    }
    inst.focus_slot.reset();
    move("senior_reply", std::move(extra));
    check_slots();
  }

  void on_keeper_reply(const std::string& text, const ReplyClassified& reply) {
    inst.pending_keeper_request.reset();
    switch (reply.kind) {
      case ReplyKind::confirmation: {
        move("confirmation");
        SlotFills attrs = inst.slot_fills;
        attrs.erase("item");
        act(Action::pick_up(inst.item, std::move(attrs)));
        return;
      }
      case ReplyKind::availability_constraint: {
        auto proposal = lp->derive_addition(text, inst.intent_name, inst.item, inst.slot_fills, *catalog(),
                                            transcript());
        move("availability_constraint");
        learn_options(proposal);
        return;
      }
      case ReplyKind::unexpected_question: {
        auto proposal = lp->derive_addition(reply.question_text.value_or(text), inst.intent_name, inst.item,
                                            inst.slot_fills, *catalog(), transcript());
        move("unexpected_question");
        learn_addition(proposal);
        return;
      }
      case ReplyKind::answer:
        move("answer");
        request_item();
        return;
    }
  }

  void retarget(const std::string& intent_name) {
    if (intent_name == inst.intent_name) return;
    const auto cat = catalog();
    const auto* spec = cat->find(intent_name);
    SlotFills inherited;
    for (const auto& [k, v] : inst.slot_fills) {
      if (spec->find_slot(k)) inherited[k] = v;
    }
    inst.intent_name = intent_name;
    inst.slot_fills = std::move(inherited);
  }

  struct Learned {
    bool intent_new = false;
    bool slot_changed = false;
    SlotSpec slot;
  };

  void log_learned(const std::string& intent, const Learned& learned) {
    if (learned.intent_new) {
      log(Actor::system, EventKind::IntentLearned,
          {{"intent", intent}, {"task", inst.task}, {"text", intent + " -> " + inst.task}});
    }
    if (learned.slot_changed) {
      log(Actor::system, EventKind::SlotLearned,
          {{"intent", intent},
           {"slot", learned.slot.name},
           {"options", join_alternatives(learned.slot.options)},
           {"text", intent + "." + learned.slot.name}});
    }
  }

  void learn_addition(const AdditionProposed& proposal) {
    Learned learned;
    try {
      learned = rt.catalog_->mutate([&](Catalog& c) {
        Learned l;
        if (!c.contains(proposal.intent_name)) {
          IntentSpec spec{proposal.intent_name, "Bring " + inst.item, {proposal.slot}, Origin::learned, 0};
          c.register_intent(std::move(spec), inst.task, rt.task_exists());
          l.intent_new = true;
          l.slot_changed = true;
        } else {
          const auto* before = c.find(proposal.intent_name)->find_slot(proposal.slot.name);
          std::optional<SlotSpec> old = before ? std::optional<SlotSpec>(*before) : std::nullopt;
          c.add_slot(proposal.intent_name, proposal.slot);
          l.slot_changed = !old || *old != *c.find(proposal.intent_name)->find_slot(proposal.slot.name);
        }
        if (proposal.options) c.set_slot_options(proposal.intent_name, proposal.slot.name, *proposal.options);
        l.slot = *c.find(proposal.intent_name)->find_slot(proposal.slot.name);
        return l;
      });
    } catch (const Error& e) {
      fail("mutation_failed", std::string(to_string(ErrorCode::CatalogMutationFailed)) + ": " + e.what());
      return;
    }
    log_learned(proposal.intent_name, learned);
    if (proposal.options) log_options(proposal.intent_name, learned.slot);
    retarget(proposal.intent_name);
    after_learning("learned", "learned_nothing_missing");
  }

  void log_options(const std::string& intent, const SlotSpec& slot) {
    log(Actor::system, EventKind::OptionsLearned,
        {{"intent", intent},
         {"slot", slot.name},
         {"options", join_alternatives(slot.options)},
         {"text", intent + "." + slot.name + " = {" + join_alternatives(slot.options) + "}"}});
  }

  void learn_options(const AdditionProposed& proposal) {
    const auto options = proposal.options ? *proposal.options : proposal.slot.options;
    if (options.empty()) {
      fail("unavailable", inst.item + " is not available");
      return;
    }
    Learned learned;
    try {
      learned = rt.catalog_->mutate([&](Catalog& c) {
        Learned l;
        auto slot = proposal.slot;
        slot.options = options;
        if (!c.contains(proposal.intent_name)) {
          IntentSpec spec{proposal.intent_name, "Bring " + inst.item, {slot}, Origin::learned, 0};
          c.register_intent(std::move(spec), inst.task, rt.task_exists());
          l.intent_new = true;
          l.slot_changed = true;
        } else if (!c.find(proposal.intent_name)->find_slot(slot.name)) {
          c.add_slot(proposal.intent_name, slot);
          l.slot_changed = true;
        }
        l.slot = c.set_slot_options(proposal.intent_name, slot.name, options);
        return l;
      });
    } catch (const Error& e) {
      fail("mutation_failed", std::string(to_string(ErrorCode::CatalogMutationFailed)) + ": " + e.what());
      return;
    }
    log_learned(proposal.intent_name, learned);
    log_options(proposal.intent_name, learned.slot);
    retarget(proposal.intent_name);

    bool contradicted = false;
    if (auto it = inst.slot_fills.find(learned.slot.name); it != inst.slot_fills.end()) {
      if (auto canonical = learned.slot.canonical_option(it->second)) {
        it->second = *canonical;
      } else {
        inst.slot_fills.erase(it);
        contradicted = true;
      }
    }
    // A single remaining variant needs no question unless the senior asked for another one.
    if (learned.slot.options.size() == 1 && !contradicted && !inst.slot_fills.contains(learned.slot.name)) {
      inst.slot_fills[learned.slot.name] = learned.slot.options.front();
    }
    after_learning("choice_required", "no_choice_required");
  }

  void on_action(const Action& action) {
    if (inst.state == "NavigateToKitchen" && action.kind == Action::Kind::NavigateTo && action.location == kKitchen) {
      ++inst.kitchen_trips;
      move("arrived");
      request_item();
    } else if (inst.state == "ReceiveItem" && action.kind == Action::Kind::PickUp) {
      inst.carrying = true;
      move("picked_up");
      act(Action::navigate_to(kSeniorRoom));
    } else if (inst.state == "NavigateToSenior" && action.kind == Action::Kind::NavigateTo &&
               action.location == kSeniorRoom) {
      if (inst.carrying) {
        move("arrived_with_item");
        act(Action::deliver());
      } else if (!missing().empty()) {
        ask_senior("arrived_slots_missing");
      } else {
        move("arrived_slots_complete");
        check_slots();
      }
    } else if (inst.state == "Deliver" && action.kind == Action::Kind::Deliver) {
      inst.carrying = false;
      move("delivered");
      say(Actor::senior, "Here is your " + inst.item + ".");
    } else {
      result.ignored = true;
    }
  }

  void on_event(const EngineEvent& event) {
    if (const auto* u = std::get_if<UtteranceArrived>(&event)) {
      if (inst.state == "AskSeniorClarification" && u->actor == Actor::senior) {
        auto interpretation = lp->detect_intent(u->text, *catalog(), transcript(), senior_speech(),
                                                Focus{inst.intent_name, inst.slot_fills}, "senior");
        on_senior_reply(interpretation);
      } else if (inst.state == "AwaitKeeperReply" && u->actor == Actor::keeper) {
        auto reply = lp->classify_keeper_reply(u->text, {inst.intent_name, inst.item, inst.slot_fills}, transcript());
        on_keeper_reply(u->text, reply);
      } else {
        result.ignored = true;
      }
    } else if (const auto* a = std::get_if<ActionFinished>(&event)) {
      on_action(a->action);
    } else {
      const auto& interpretation = std::get<InterpretationReady>(event).interpretation;
      if (inst.state == "AskSeniorClarification" &&
          (std::holds_alternative<IntentDetected>(interpretation) || std::holds_alternative<Unknown>(interpretation))) {
        on_senior_reply(interpretation);
      } else if (const auto* r = std::get_if<ReplyClassified>(&interpretation);
                 r && inst.state == "AwaitKeeperReply") {
        on_keeper_reply(r->question_text.value_or(inst.pending_keeper_request.value_or("")), *r);
      } else {
        result.ignored = true;
      }
    }
  }

  // Runs `body`; an illegal transition fails the instance, anything else
  // restores it and propagates.
  template <typename Body>
  StepResult guarded(Body&& body) {
    const auto saved = inst;
    try {
      body();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IllegalTransition) {
        inst = saved;
        throw;
      }
      fail("illegal_transition", e.what());
    }
    return std::move(result);
  }
};

TaskRuntime::TaskRuntime(CatalogStore& catalog, ContextStore& context) : catalog_(&catalog), context_(&context) {}

void TaskRuntime::register_task(TaskDef def) {
  def.validate();
  if (tasks_.contains(def.name)) throw Error(ErrorCode::DuplicateTask, "task '" + def.name + "' already exists");
  auto name = def.name;
  tasks_.emplace(std::move(name), std::move(def));
}

bool TaskRuntime::has_task(std::string_view name) const { return tasks_.find(name) != tasks_.end(); }

const TaskDef& TaskRuntime::task(std::string_view name) const {
  auto it = tasks_.find(name);
  if (it == tasks_.end()) throw Error(ErrorCode::UnknownTask, "no task '" + std::string(name) + "'");
  return it->second;
}

TaskExists TaskRuntime::task_exists() const {
  return [this](std::string_view name) { return has_task(name); };
}

TaskInstance TaskRuntime::dispatch(std::string_view intent_name, const SlotFills& slot_fills,
                                   const SessionId& session, const std::vector<DroppedFill>& dropped,
                                   std::uint64_t origin_seq) {
  const auto cat = catalog_->snapshot();
  const auto task_name = cat->resolve_task(intent_name);
  const auto& def = task(task_name);
  const auto* spec = cat->find(intent_name);
  if (!spec) throw Error(ErrorCode::UnknownIntent, "no intent '" + std::string(intent_name) + "'");

  TaskInstance inst;
  inst.id = "t" + std::to_string(next_instance_++);
  inst.task = def.name;
  inst.session = session;
  inst.intent_name = spec->name;
  for (const auto& [k, v] : slot_fills) {
    if (spec->find_slot(k)) inst.slot_fills[k] = v;
  }
  inst.item = item_of(spec->name, slot_fills);
  inst.state = def.initial_state;
  inst.origin_seq = origin_seq;

  Payload p{{"instance", inst.id},
            {"task", inst.task},
            {"intent", inst.intent_name},
            {"item", inst.item},
            {"fills", render_fills(inst.slot_fills)},
            {"text", inst.task + " for " + inst.intent_name + " (" + render_fills(inst.slot_fills) + ")"}};
  if (!dropped.empty()) p["dropped"] = describe(dropped);
  context_->append(session, Actor::system, EventKind::TaskStarted, std::move(p));
  return inst;
}

StepResult TaskRuntime::start(TaskInstance& instance, LanguageProcessor& lp) {
  Run run{*this, instance, &lp, {}};
  return run.guarded([&] {
    if (instance.state != "CheckSlots") {
      throw Error(ErrorCode::IllegalTransition, "cannot start an instance in state " + instance.state);
    }
    run.check_slots();
  });
}

StepResult TaskRuntime::advance(TaskInstance& instance, const EngineEvent& event, LanguageProcessor& lp) {
  if (instance.terminal()) return StepResult{{}, {}, true};
  Run run{*this, instance, &lp, {}};
  return run.guarded([&] { run.on_event(event); });
}

StepResult TaskRuntime::fail(TaskInstance& instance, const std::string& reason) {
  if (instance.terminal()) return StepResult{{}, {}, true};
  Run run{*this, instance, nullptr, {}};
  run.fail("fault", reason);
  return std::move(run.result);
}

std::vector<std::string> TaskRuntime::missing_slots(const TaskInstance& instance, const Catalog& catalog) {
  const auto* spec = catalog.find(instance.intent_name);
  if (!spec) throw Error(ErrorCode::UnknownIntent, "no intent '" + instance.intent_name + "'");
  std::vector<std::string> out;
  for (const auto& slot : spec->slots) {
    if (slot.required && !instance.slot_fills.contains(slot.name)) out.push_back(slot.name);
  }
  return out;
}

}  // namespace carebot
