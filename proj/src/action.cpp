#include "carebot/action.hpp"

#include "carebot/errors.hpp"

namespace carebot {

using nlohmann::json;

Action Action::navigate_to(std::string_view location) {
  Action a;
  a.kind = Kind::NavigateTo;
  a.location = std::string(location);
  return a;
}

Action Action::pick_up(std::string item, std::map<std::string, std::string> attrs) {
  Action a;
  a.kind = Kind::PickUp;
  a.item = std::move(item);
  a.attrs = std::move(attrs);
  return a;
}

Action Action::deliver() {
  Action a;
  a.kind = Kind::Deliver;
  return a;
}

std::string_view to_string(Action::Kind kind) {
  switch (kind) {
    case Action::Kind::NavigateTo: return "NavigateTo";
    case Action::Kind::PickUp: return "PickUp";
    case Action::Kind::Deliver: return "Deliver";
  }
  return "NavigateTo";
}

std::string Action::describe() const {
  switch (kind) {
    case Kind::NavigateTo: return "NavigateTo(" + location + ")";
    case Kind::PickUp: {
      std::string out = "PickUp(" + item;
      bool first = true;
      for (const auto& [k, v] : attrs) {
        out += first ? "; " : ", ";
        out += k + "=" + v;
        first = false;
      }
      return out + ")";
    }
    case Kind::Deliver: return "Deliver";
  }
  return {};
}

json to_json(const Action& action) {
  json j{{"kind", to_string(action.kind)}};
  if (action.kind == Action::Kind::NavigateTo) j["location"] = action.location;
  if (action.kind == Action::Kind::PickUp) {
    j["item"] = action.item;
    j["attrs"] = action.attrs;
  }
  return j;
}

Action action_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorCode::InvalidArgument, "action needs a 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "NavigateTo") return Action::navigate_to(j.at("location").get<std::string>());
    if (kind == "PickUp") {
      return Action::pick_up(j.at("item").get<std::string>(),
                             j.value("attrs", std::map<std::string, std::string>{}));
    }
    if (kind == "Deliver") return Action::deliver();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad action: ") + e.what());
  }
  throw Error(ErrorCode::InvalidArgument, "unknown action kind '" + kind + "'");
}

}  // namespace carebot
