#include "carebot/remote_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "carebot/errors.hpp"

namespace carebot {

using nlohmann::json;

std::optional<RemoteConfig> RemoteConfig::from_env() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  RemoteConfig config{env("LLM_BASE_URL"), env("LLM_API_KEY"), env("LLM_MODEL")};
  if (config.base_url.empty() || config.model.empty()) return std::nullopt;
  return config;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  auto url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::BackendUnavailable, "LLM_BASE_URL needs a scheme: " + config_.base_url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
}

std::string RemoteBackend::complete(const std::string& prompt) {
  httplib::Client client(origin_);
  const auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const json body = {{"model", config_.model},
                     {"temperature", 0},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  auto res = client.Post(path_prefix_ + "/chat/completions", headers,
                         body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
  if (!res) {
    throw Error(ErrorCode::BackendFailure, "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::BackendFailure,
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  const auto reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw Error(ErrorCode::BackendFailure, "response is not JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::BackendFailure, "response has no choices[0].message.content");
  }
}

}  // namespace carebot
