#pragma once

#include <string>

namespace carebot {

/// Anything that turns a prompt into completion text: a remote language
/// model, or a deterministic stand-in.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  /// Throws Error(BackendFailure) when no completion can be produced.
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string identity() const = 0;
};

}  // namespace carebot
