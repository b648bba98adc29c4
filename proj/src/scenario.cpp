#include "carebot/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

[[noreturn]] void invalid_script(const std::string& why) { throw Error(ErrorCode::InvalidScript, why); }

std::string field_of(const ContextEvent& e, const std::string& key) {
  if (auto it = e.payload.find(key); it != e.payload.end()) return it->second;
  if (key == "text") return primary_text(e);
  return {};
}

std::string event_line(const ContextEvent& e) {
  return "#" + std::to_string(e.seq) + " [" + std::string(to_string(e.actor)) + "] " +
         std::string(to_string(e.kind)) + ": " + primary_text(e);
}

std::optional<std::size_t> first_match(const EventMatcher& m, const std::vector<ContextEvent>& events,
                                       std::size_t from = 0) {
  for (std::size_t i = from; i < events.size(); ++i) {
    if (m.matches(events[i])) return i;
  }
  return std::nullopt;
}

std::string default_label(const Expectation& e) {
  switch (e.type) {
    case Expectation::Type::event: return "event " + e.match.describe();
    case Expectation::Type::absent: return "absent " + e.match.describe();
    case Expectation::Type::before: return e.match.describe() + " before " + e.then.describe();
    case Expectation::Type::sequence: return "sequence of " + std::to_string(e.steps.size()) + " events";
    case Expectation::Type::catalog: {
      std::string label = "catalog has " + e.intent;
      if (e.slot) label += "." + *e.slot;
      if (e.options) label += " = {" + join_alternatives(*e.options) + "}";
      return label;
    }
  }
  return {};
}

ContextEvent event_from_wire(const json& j) {
  try {
    return event_from_json(j);
  } catch (const Error& e) {
    throw Error(ErrorCode::IoFailure, std::string("service sent a bad event: ") + e.what());
  }
}

std::unique_ptr<httplib::Client> make_client(const std::string& base_url) {
  auto client = std::make_unique<httplib::Client>(base_url);
  if (!client->is_valid()) throw Error(ErrorCode::IoFailure, "cannot use service URL '" + base_url + "'");
  client->set_connection_timeout(5, 0);
  client->set_read_timeout(120, 0);
  return client;
}

}  // namespace

bool EventMatcher::matches(const ContextEvent& event) const {
  if (kind && event.kind != *kind) return false;
  if (actor && event.actor != *actor) return false;
  for (const auto& [key, want] : payload) {
    if (!contains_folded(field_of(event, key), want)) return false;
  }
  return true;
}

std::string EventMatcher::describe() const {
  std::string out = kind ? std::string(to_string(*kind)) : "any";
  if (actor) out = "[" + std::string(to_string(*actor)) + "] " + out;
  if (!payload.empty()) {
    out += "{";
    bool first = true;
    for (const auto& [k, v] : payload) {
      if (!first) out += ", ";
      out += k + "~\"" + v + "\"";
      first = false;
    }
    out += "}";
  }
  return out;
}

EventMatcher EventMatcher::from_json(const json& j) {
  if (!j.is_object()) invalid_script("event matcher must be an object");
  EventMatcher m;
  if (j.contains("kind")) {
    if (!j.at("kind").is_string()) invalid_script("matcher kind must be a string");
    m.kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!m.kind) invalid_script("unknown event kind '" + j.at("kind").get<std::string>() + "'");
  }
  if (j.contains("actor")) {
    if (!j.at("actor").is_string()) invalid_script("matcher actor must be a string");
    m.actor = actor_from_string(j.at("actor").get<std::string>());
    if (!m.actor) invalid_script("unknown actor '" + j.at("actor").get<std::string>() + "'");
  }
  if (j.contains("payload")) {
    if (!j.at("payload").is_object()) invalid_script("matcher payload must be an object");
    for (const auto& [k, v] : j.at("payload").items()) {
      if (!v.is_string()) invalid_script("matcher payload value for '" + k + "' must be a string");
      m.payload[k] = v.get<std::string>();
    }
  }
  if (j.contains("text")) {
    if (!j.at("text").is_string()) invalid_script("matcher text must be a string");
    m.payload["text"] = j.at("text").get<std::string>();
  }
  if (!m.kind && !m.actor && m.payload.empty()) invalid_script("matcher selects every event");
  return m;
}

Expectation Expectation::from_json(const json& j, std::size_t index) {
  const auto where = "expectation " + std::to_string(index + 1);
  if (!j.is_object()) invalid_script(where + " must be an object");
  if (!j.contains("type") || !j.at("type").is_string()) invalid_script(where + " needs a type");
  const auto type = j.at("type").get<std::string>();
  Expectation e;
  try {
    if (type == "event" || type == "absent") {
      e.type = type == "event" ? Type::event : Type::absent;
      e.match = EventMatcher::from_json(j);
    } else if (type == "before") {
      e.type = Type::before;
      if (!j.contains("first") || !j.contains("then")) invalid_script(where + " needs 'first' and 'then'");
      e.match = EventMatcher::from_json(j.at("first"));
      e.then = EventMatcher::from_json(j.at("then"));
    } else if (type == "sequence") {
      e.type = Type::sequence;
      if (!j.contains("events") || !j.at("events").is_array() || j.at("events").empty()) {
        invalid_script(where + " needs a non-empty 'events' list");
      }
      for (const auto& m : j.at("events")) e.steps.push_back(EventMatcher::from_json(m));
    } else if (type == "catalog") {
      e.type = Type::catalog;
      if (!j.contains("intent") || !j.at("intent").is_string()) invalid_script(where + " needs an intent");
      e.intent = normalize_name(j.at("intent").get<std::string>());
      if (j.contains("slot")) e.slot = normalize_name(j.at("slot").get<std::string>());
      if (j.contains("options")) {
        if (!e.slot) invalid_script(where + ": options need a slot");
        e.options = fold_unique(j.at("options").get<std::vector<std::string>>());
      }
    } else {
      invalid_script(where + ": unknown type '" + type + "'");
    }
    if (j.contains("label")) e.label = j.at("label").get<std::string>();
  } catch (const json::exception& ex) {
    invalid_script(where + ": " + ex.what());
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::InvalidScript) throw;
    const std::string what = ex.what();
    if (what.find(where) != std::string::npos) throw;
    invalid_script(where + ": " + what);
  }
  if (e.label.empty()) e.label = default_label(e);
  return e;
}

ScenarioScript ScenarioScript::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) invalid_script("scenario must be a JSON object");
  ScenarioScript s;
  auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_string()) invalid_script(std::string("'") + key + "' must be a path");
    std::filesystem::path p = j.at(key).get<std::string>();
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  try {
    s.name = j.value("name", std::string{});
    s.backend = j.value("backend", std::string("scripted"));
    const auto mode = j.value("mode", std::string("scripted_keeper"));
    auto parsed = keeper_mode_from_string(mode);
    if (!parsed) invalid_script("unknown mode '" + mode + "'");
    s.mode = *parsed;
  } catch (const json::exception& e) {
    invalid_script(e.what());
  }
  if (s.name.empty()) invalid_script("scenario needs a name");
  s.world = path_of("world");
  s.catalog = path_of("catalog");

  if (!j.contains("steps") || !j.at("steps").is_array() || j.at("steps").empty()) {
    invalid_script("scenario needs at least one step");
  }
  for (const auto& step : j.at("steps")) {
    if (!step.is_object() || !step.contains("actor") || !step.contains("text") || !step.at("actor").is_string() ||
        !step.at("text").is_string()) {
      invalid_script("each step needs an actor and a text");
    }
    auto actor = actor_from_string(step.at("actor").get<std::string>());
    if (!actor || (*actor != Actor::senior && *actor != Actor::keeper)) {
      invalid_script("step actor must be senior or keeper");
    }
    if (trim(step.at("text").get<std::string>()).empty()) invalid_script("step text is empty");
    s.steps.push_back({*actor, step.at("text").get<std::string>()});
  }
  if (j.contains("expectations")) {
    if (!j.at("expectations").is_array()) invalid_script("'expectations' must be a list");
    for (std::size_t i = 0; i < j.at("expectations").size(); ++i) {
      s.expectations.push_back(Expectation::from_json(j.at("expectations")[i], i));
    }
  }
  return s;
}

ScenarioScript ScenarioScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid_script("cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) invalid_script("scenario is not valid JSON: " + path.string());
  return from_json(doc, path.parent_path());
}

bool ScenarioReport::passed() const {
  return !step_error && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

const ExpectationResult* ScenarioReport::first_failure() const {
  for (const auto& r : results) {
    if (!r.passed) return &r;
  }
  return nullptr;
}

std::string ScenarioReport::render() const {
  std::ostringstream out;
  std::size_t ok = 0;
  for (const auto& r : results) ok += r.passed ? 1 : 0;
  out << "scenario " << name << ": " << (passed() ? "PASS" : "FAIL") << " (" << ok << "/" << results.size()
      << " expectations)\n";
  if (step_error) out << "  step error: " << *step_error << "\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << "  " << (r.passed ? "ok  " : "FAIL") << " " << (i + 1) << ". " << r.label;
    if (!r.passed && !r.detail.empty()) out << ": " << r.detail;
    out << "\n";
  }
  if (const auto* f = first_failure()) out << "first failure: " << f->label << "\n";
  return out.str();
}

ExpectationResult evaluate(const Expectation& e, const std::vector<ContextEvent>& events, const Catalog& catalog) {
  ExpectationResult r{e.label, false, {}};
  switch (e.type) {
    case Expectation::Type::event:
      r.passed = first_match(e.match, events).has_value();
      if (!r.passed) r.detail = "no matching event";
      break;
    case Expectation::Type::absent:
      if (auto i = first_match(e.match, events)) {
        r.detail = "found " + event_line(events[*i]);
      } else {
        r.passed = true;
      }
      break;
    case Expectation::Type::before: {
      auto a = first_match(e.match, events);
      auto b = first_match(e.then, events);
      if (!a) {
        r.detail = "first event never happened";
      } else if (b && *b < *a) {
        r.detail = "found " + event_line(events[*b]) + " first";
      } else {
        r.passed = true;
      }
      break;
    }
    case Expectation::Type::sequence: {
      std::size_t from = 0;
      r.passed = true;
      for (std::size_t k = 0; k < e.steps.size(); ++k) {
        auto i = first_match(e.steps[k], events, from);
        if (!i) {
          r.passed = false;
          r.detail = "step " + std::to_string(k + 1) + " (" + e.steps[k].describe() + ") not found in order";
          break;
        }
        from = *i + 1;
      }
      break;
    }
    case Expectation::Type::catalog: {
      const auto* intent = catalog.find(e.intent);
      if (!intent) {
        r.detail = "no intent " + e.intent;
        break;
      }
      if (!e.slot) {
        r.passed = true;
        break;
      }
      const auto* slot = intent->find_slot(*e.slot);
      if (!slot) {
        r.detail = e.intent + " has no slot " + *e.slot;
        break;
      }
      if (e.options) {
        auto want = *e.options;
        auto have = slot->options;
        std::sort(want.begin(), want.end());
        std::sort(have.begin(), have.end());
        if (want != have) {
          r.detail = "options are {" + join_alternatives(slot->options) + "}";
          break;
        }
      }
      r.passed = true;
      break;
    }
  }
  return r;
}

void GatewayTarget::open(const ScenarioScript& script) {
  SessionOptions options;
  options.mode = script.mode;
  options.backend = script.backend;
  session_ = gateway_->create_session(options);
}

std::vector<ContextEvent> GatewayTarget::post(Actor actor, const std::string& text) {
  return gateway_->post_utterance(session_, actor, text);
}

struct HttpTarget::Impl {
  std::string base_url;
  std::unique_ptr<httplib::Client> client;
  std::string session;

  json request(const char* method, const std::string& path, const json* body) {
    httplib::Result res = body ? client->Post(path, body->dump(), "application/json") : client->Get(path);
    if (!res) throw Error(ErrorCode::IoFailure, std::string(method) + " " + path + ": " + httplib::to_string(res.error()));
    auto reply = json::parse(res->body, nullptr, false);
    if (res->status >= 400) {
      std::string message = res->body;
      if (!reply.is_discarded() && reply.contains("message")) message = reply.at("message").get<std::string>();
      throw Error(ErrorCode::IoFailure, std::string(method) + " " + path + " -> HTTP " +
                                            std::to_string(res->status) + ": " + message);
    }
    if (reply.is_discarded()) throw Error(ErrorCode::IoFailure, path + " did not return JSON");
    return reply;
  }
};

HttpTarget::HttpTarget(std::string base_url) : impl_(std::make_unique<Impl>()) {
  impl_->base_url = std::move(base_url);
  impl_->client = make_client(impl_->base_url);
}

HttpTarget::~HttpTarget() = default;

void HttpTarget::open(const ScenarioScript& script) {
  json body{{"mode", to_string(script.mode)}, {"backend", script.backend}};
  if (script.world) body["world"] = std::filesystem::absolute(*script.world).string();
  impl_->session = impl_->request("POST", "/sessions", &body).at("session_id").get<std::string>();
}

std::vector<ContextEvent> HttpTarget::post(Actor actor, const std::string& text) {
  const json body{{"actor", to_string(actor)}, {"text", text}};
  auto reply = impl_->request("POST", "/sessions/" + impl_->session + "/utterances", &body);
  std::vector<ContextEvent> events;
  for (const auto& e : reply.at("events")) events.push_back(event_from_wire(e));
  return events;
}

Catalog HttpTarget::catalog() { return Catalog::from_document(fetch_catalog_document(impl_->base_url)); }

ScenarioReport run_scenario(const ScenarioScript& script, ScenarioTarget& target) {
  ScenarioReport report;
  report.name = script.name;
  target.open(script);
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& step = script.steps[i];
    try {
      auto events = target.post(step.actor, step.text);
      report.events.insert(report.events.end(), events.begin(), events.end());
    } catch (const Error& e) {
      report.step_error = "step " + std::to_string(i + 1) + " (" + std::string(to_string(step.actor)) + ": \"" +
                          step.text + "\"): " + e.what();
      break;
    }
  }
  const auto catalog = target.catalog();
  for (const auto& e : script.expectations) report.results.push_back(evaluate(e, report.events, catalog));
  return report;
}

std::string fetch_catalog_document(const std::string& base_url) {
  auto client = make_client(base_url);
  auto res = client->Get("/catalog");
  if (!res) throw Error(ErrorCode::IoFailure, "GET /catalog: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::IoFailure, "GET /catalog -> HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace carebot
