#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace carebot {

inline constexpr std::string_view kSeniorRoom = "senior_room";
inline constexpr std::string_view kKitchen = "kitchen";

/// A robot action. `location` is used by NavigateTo, `item` and `attrs` by PickUp.
struct Action {
  enum class Kind { NavigateTo, PickUp, Deliver };

  Kind kind = Kind::NavigateTo;
  std::string location;
  std::string item;
  std::map<std::string, std::string> attrs;

  static Action navigate_to(std::string_view location);
  static Action pick_up(std::string item, std::map<std::string, std::string> attrs);
  static Action deliver();

  /// "NavigateTo(kitchen)", "PickUp(juice; which=apple)", "Deliver".
  std::string describe() const;

  friend bool operator==(const Action&, const Action&) = default;
};

std::string_view to_string(Action::Kind kind);

nlohmann::json to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

}  // namespace carebot
