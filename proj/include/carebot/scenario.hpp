#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/context_store.hpp"
#include "carebot/gateway.hpp"
#include "carebot/intent_catalog.hpp"

namespace carebot {

/// Selects context events. Payload values match as case-insensitive substrings.
struct EventMatcher {
  std::optional<EventKind> kind;
  std::optional<Actor> actor;
  std::map<std::string, std::string> payload;

  bool matches(const ContextEvent& event) const;
  std::string describe() const;
  static EventMatcher from_json(const nlohmann::json& j);
};

struct Expectation {
  enum class Type { event, absent, before, sequence, catalog };

  Type type = Type::event;
  std::string label;
  EventMatcher match;               // event, absent; first of before
  EventMatcher then;                // second of before
  std::vector<EventMatcher> steps;  // sequence
  std::string intent;               // catalog
  std::optional<std::string> slot;
  std::optional<std::vector<std::string>> options;

  static Expectation from_json(const nlohmann::json& j, std::size_t index);
};

struct ScenarioStep {
  Actor actor = Actor::senior;
  std::string text;
};

struct ScenarioScript {
  std::string name;
  std::string backend = "scripted";
  KeeperMode mode = KeeperMode::scripted_keeper;
  std::optional<std::filesystem::path> world;
  std::optional<std::filesystem::path> catalog;
  std::vector<ScenarioStep> steps;
  std::vector<Expectation> expectations;

  /// Relative paths resolve against `base_dir`. Throws InvalidScript.
  static ScenarioScript from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ScenarioScript load(const std::filesystem::path& path);
};

struct ExpectationResult {
  std::string label;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<ExpectationResult> results;
  /// Set when a step could not be processed; expectations then still run.
  std::optional<std::string> step_error;
  std::vector<ContextEvent> events;

  bool passed() const;
  const ExpectationResult* first_failure() const;
  std::string render() const;
};

ExpectationResult evaluate(const Expectation& expectation, const std::vector<ContextEvent>& events,
                           const Catalog& catalog);

/// Where a scenario is played: an in-process gateway or a running service.
class ScenarioTarget {
 public:
  virtual ~ScenarioTarget() = default;
  virtual void open(const ScenarioScript& script) = 0;
  virtual std::vector<ContextEvent> post(Actor actor, const std::string& text) = 0;
  virtual Catalog catalog() = 0;
};

class GatewayTarget : public ScenarioTarget {
 public:
  explicit GatewayTarget(Gateway& gateway) : gateway_(&gateway) {}
  void open(const ScenarioScript& script) override;
  std::vector<ContextEvent> post(Actor actor, const std::string& text) override;
  Catalog catalog() override { return *gateway_->catalog_snapshot(); }
  const SessionId& session() const { return session_; }

 private:
  Gateway* gateway_;
  SessionId session_;
};

/// Talks to `carebot serve` at `base_url`; events are the accumulated POST responses.
class HttpTarget : public ScenarioTarget {
 public:
  explicit HttpTarget(std::string base_url);
  ~HttpTarget() override;
  void open(const ScenarioScript& script) override;
  std::vector<ContextEvent> post(Actor actor, const std::string& text) override;
  Catalog catalog() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Plays every step, then evaluates the expectations against all events
/// returned and the final catalog.
ScenarioReport run_scenario(const ScenarioScript& script, ScenarioTarget& target);

/// GET {base_url}/catalog. Throws IoFailure.
std::string fetch_catalog_document(const std::string& base_url);

}  // namespace carebot
