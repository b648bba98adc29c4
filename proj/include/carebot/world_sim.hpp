#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/action.hpp"

namespace carebot {

struct Dimension {
  std::string name;  // as configured, e.g. "blackOrGreen"
  std::vector<std::string> values;
  std::string question;  // what the keeper asks when it is unspecified

  std::string key() const;  // normalized name, matches slot names
};

struct WorldConfig {
  std::vector<std::string> locations;
  std::map<std::string, std::vector<Dimension>> items;
  std::map<std::pair<std::string, std::string>, int> travel_ticks;

  /// Ticks from one location to another; 1 for unlisted pairs.
  int travel(std::string_view from, std::string_view to) const;
  bool has_location(std::string_view name) const;
  const std::vector<Dimension>* find_item(std::string_view name) const;

  /// Throws InvalidConfig on any violated invariant.
  static WorldConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Throws IoFailure or InvalidConfig.
WorldConfig load_world_config(const std::filesystem::path& path);

struct CarriedItem {
  std::string item;
  std::map<std::string, std::string> attrs;

  friend bool operator==(const CarriedItem&, const CarriedItem&) = default;
};

struct WorldState {
  std::string robot_location{kSeniorRoom};
  std::optional<CarriedItem> carried;
  long tick = 0;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct ActionOutcome {
  WorldState state;
  int ticks = 0;
};

/// Throws IllegalAction when the action's precondition does not hold.
ActionOutcome apply_action(const WorldConfig& config, const WorldState& state, const Action& action);

struct KeeperReply {
  enum class Kind { question, constraint, confirmation };

  Kind kind = Kind::confirmation;
  std::string text;
  std::optional<std::string> asked;  // dimension key, for questions
};

/// The scripted keeper. `request` maps slot names to values; `asked` holds the
/// dimension keys already asked during this errand. Throws UnknownItem.
KeeperReply keeper_reply(const WorldConfig& config, std::string_view item,
                         const std::map<std::string, std::string>& request,
                         const std::set<std::string>& asked);

}  // namespace carebot
