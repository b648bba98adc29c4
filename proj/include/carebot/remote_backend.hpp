#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "carebot/completion_backend.hpp"

namespace carebot {

struct RemoteConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{30};

  /// Reads LLM_BASE_URL, LLM_API_KEY and LLM_MODEL; nullopt if base URL or model is unset.
  static std::optional<RemoteConfig> from_env();
};

/// Chat-completions client: POST {base_url}/chat/completions with the prompt
/// as a single user message, returning choices[0].message.content.
class RemoteBackend : public CompletionBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);

  std::string complete(const std::string& prompt) override;
  std::string identity() const override { return "remote:" + config_.model; }

 private:
  RemoteConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. /v1
};

}  // namespace carebot
