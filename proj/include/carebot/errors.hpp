#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carebot {

enum class ErrorCode {
  InvalidArgument,
  // intent catalog
  DuplicateIntent,
  UnknownIntent,
  UnknownSlot,
  UnknownTask,
  NoBinding,
  IoFailure,
  CorruptCatalog,
  // context store
  UnknownSession,
  CorruptLog,
  // language processor
  MissingPlaceholder,
  MalformedCompletion,
  BackendFailure,
  BackendUnavailable,
  // task runtime
  DuplicateTask,
  InvalidDef,
  IllegalTransition,
  CatalogMutationFailed,
  // world
  IllegalAction,
  UnknownItem,
  InvalidConfig,
  // gateway / cli
  ActorNotAllowed,
  SessionClosed,
  InvalidScript,
};

std::string_view to_string(ErrorCode code);

/// The one exception type thrown by the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace carebot
