#include "carebot/world_sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "carebot/errors.hpp"
#include "carebot/names.hpp"

namespace carebot {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidConfig, "world: " + why); }

std::optional<std::string> request_value(const std::map<std::string, std::string>& request,
                                         const Dimension& dim) {
  for (const auto& [k, v] : request) {
    if (normalize_name(k) == dim.key()) return fold_value(v);
  }
  return std::nullopt;
}

bool offers(const Dimension& dim, const std::string& value) {
  return std::find(dim.values.begin(), dim.values.end(), value) != dim.values.end();
}

}  // namespace

std::string Dimension::key() const { return normalize_name(name); }

int WorldConfig::travel(std::string_view from, std::string_view to) const {
  auto it = travel_ticks.find({std::string(from), std::string(to)});
  return it == travel_ticks.end() ? 1 : it->second;
}

bool WorldConfig::has_location(std::string_view name) const {
  return std::find(locations.begin(), locations.end(), name) != locations.end();
}

const std::vector<Dimension>* WorldConfig::find_item(std::string_view name) const {
  auto it = items.find(fold_value(name));
  return it == items.end() ? nullptr : &it->second;
}

WorldConfig WorldConfig::from_json(const json& doc) {
  if (!doc.is_object()) invalid("document must be an object");
  WorldConfig cfg;
  try {
    cfg.locations = doc.value("locations", std::vector<std::string>{std::string(kSeniorRoom),
                                                                    std::string(kKitchen)});
  } catch (const json::exception&) {
    invalid("'locations' must be a list of names");
  }
  for (auto& l : cfg.locations) {
    l = normalize_name(l);
    if (l.empty()) invalid("empty location name");
  }
  if (std::set<std::string>(cfg.locations.begin(), cfg.locations.end()).size() != cfg.locations.size()) {
    invalid("duplicate location");
  }
  for (auto required : {kSeniorRoom, kKitchen}) {
    if (!cfg.has_location(required)) invalid("missing location '" + std::string(required) + "'");
  }

  if (!doc.contains("items") || !doc.at("items").is_object()) invalid("'items' must be an object");
  for (const auto& [raw_item, dims] : doc.at("items").items()) {
    const auto item = fold_value(raw_item);
    if (item.empty()) invalid("empty item name");
    if (!dims.is_array()) invalid("dimensions of '" + item + "' must be a list");
    std::vector<Dimension> parsed;
    std::set<std::string> keys;
    for (const auto& d : dims) {
      if (!d.is_object() || !d.contains("name") || !d.at("name").is_string()) {
        invalid("dimension of '" + item + "' needs a name");
      }
      Dimension dim;
      dim.name = trim(d.at("name").get<std::string>());
      if (dim.key().empty()) invalid("empty dimension name on '" + item + "'");
      if (!keys.insert(dim.key()).second) invalid("duplicate dimension '" + dim.name + "' on '" + item + "'");
      if (!d.contains("values") || !d.at("values").is_array()) {
        invalid("dimension '" + dim.name + "' needs a value list");
      }
      std::vector<std::string> values;
      for (const auto& v : d.at("values")) {
        if (!v.is_string() || fold_value(v.get<std::string>()).empty()) {
          invalid("dimension '" + dim.name + "' has a bad value");
        }
        values.push_back(v.get<std::string>());
      }
      dim.values = fold_unique(values);
      if (dim.values.empty()) invalid("dimension '" + dim.name + "' of '" + item + "' has no values");
      if (d.contains("question")) {
        if (!d.at("question").is_string()) invalid("question of '" + dim.name + "' must be text");
        dim.question = trim(d.at("question").get<std::string>());
      }
      if (dim.question.empty()) dim.question = "Which " + dim.name + " of " + item + "?";
      parsed.push_back(std::move(dim));
    }
    if (!cfg.items.emplace(item, std::move(parsed)).second) invalid("duplicate item '" + item + "'");
  }

  if (doc.contains("travel_ticks")) {
    if (!doc.at("travel_ticks").is_array()) invalid("'travel_ticks' must be a list");
    for (const auto& t : doc.at("travel_ticks")) {
      if (!t.is_object() || !t.contains("from") || !t.contains("to") || !t.contains("ticks") ||
          !t.at("from").is_string() || !t.at("to").is_string() || !t.at("ticks").is_number_integer()) {
        invalid("travel entry needs from, to and integer ticks");
      }
      auto from = normalize_name(t.at("from").get<std::string>());
      auto to = normalize_name(t.at("to").get<std::string>());
      const int ticks = t.at("ticks").get<int>();
      if (!cfg.has_location(from) || !cfg.has_location(to)) invalid("travel between unknown locations");
      if (ticks <= 0) invalid("travel ticks must be positive");
      auto [it, inserted] = cfg.travel_ticks.emplace(std::pair{from, to}, ticks);
      if (!inserted && it->second != ticks) invalid("conflicting travel ticks " + from + " -> " + to);
    }
    for (const auto& [pair, ticks] : cfg.travel_ticks) {
      auto back = cfg.travel_ticks.find({pair.second, pair.first});
      if (back != cfg.travel_ticks.end() && back->second != ticks) {
        invalid("travel ticks between " + pair.first + " and " + pair.second + " are not symmetric");
      }
    }
    // A one-way entry describes both directions.
    auto copy = cfg.travel_ticks;
    for (const auto& [pair, ticks] : copy) cfg.travel_ticks.emplace(std::pair{pair.second, pair.first}, ticks);
  }
  return cfg;
}

json WorldConfig::to_json() const {
  json items_json = json::object();
  for (const auto& [item, dims] : items) {
    json list = json::array();
    for (const auto& d : dims) list.push_back({{"name", d.name}, {"values", d.values}, {"question", d.question}});
    items_json[item] = std::move(list);
  }
  json ticks = json::array();
  for (const auto& [pair, t] : travel_ticks) ticks.push_back({{"from", pair.first}, {"to", pair.second}, {"ticks", t}});
  return {{"locations", locations}, {"items", items_json}, {"travel_ticks", ticks}};
}

WorldConfig load_world_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read world config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) invalid("not valid JSON: " + path.string());
  return WorldConfig::from_json(doc);
}

ActionOutcome apply_action(const WorldConfig& config, const WorldState& state, const Action& action) {
  auto illegal = [&](const std::string& why) {
    return Error(ErrorCode::IllegalAction, action.describe() + ": " + why);
  };
  ActionOutcome out{state, 1};
  switch (action.kind) {
    case Action::Kind::NavigateTo: {
      if (!config.has_location(action.location)) throw illegal("unknown location");
      out.ticks = action.location == state.robot_location ? 1 : config.travel(state.robot_location, action.location);
      out.state.robot_location = action.location;
      break;
    }
    case Action::Kind::PickUp: {
      if (state.robot_location != kKitchen) throw illegal("the robot is not in the kitchen");
      if (state.carried) throw illegal("the robot already carries " + state.carried->item);
      const auto* dims = config.find_item(action.item);
      if (!dims) throw illegal("no such item");
      CarriedItem carried{fold_value(action.item), {}};
      for (const auto& dim : *dims) {
        auto v = request_value(action.attrs, dim);
        if (!v) continue;
        if (!offers(dim, *v)) throw illegal(dim.name + "=" + *v + " is not available");
        carried.attrs[dim.key()] = *v;
      }
      out.state.carried = std::move(carried);
      break;
    }
    case Action::Kind::Deliver: {
      if (state.robot_location != kSeniorRoom) throw illegal("the robot is not in the senior's room");
      if (!state.carried) throw illegal("the robot carries nothing");
      out.state.carried.reset();
      break;
    }
  }
  out.state.tick += out.ticks;
  return out;
}

KeeperReply keeper_reply(const WorldConfig& config, std::string_view item,
                         const std::map<std::string, std::string>& request,
                         const std::set<std::string>& asked) {
  const auto* dims = config.find_item(item);
  if (!dims) throw Error(ErrorCode::UnknownItem, "no item '" + std::string(item) + "' in the kitchen");
  const auto name = fold_value(item);

  for (const auto& dim : *dims) {
    if (dim.values.size() > 1 && !request_value(request, dim) && !asked.contains(dim.key())) {
      return {KeeperReply::Kind::question, dim.question, dim.key()};
    }
  }
  for (const auto& dim : *dims) {
    auto v = request_value(request, dim);
    const bool constrained = dim.values.size() == 1 ? (!v || *v != dim.values.front()) : (v && !offers(dim, *v));
    if (constrained) {
      return {KeeperReply::Kind::constraint, "We only have " + join_alternatives(dim.values) + " " + name + ".",
              std::nullopt};
    }
  }
  return {KeeperReply::Kind::confirmation, "Here you are.", std::nullopt};
}

}  // namespace carebot
