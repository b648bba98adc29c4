#include "carebot/errors.hpp"

namespace carebot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateIntent: return "DuplicateIntent";
    case ErrorCode::UnknownIntent: return "UnknownIntent";
    case ErrorCode::UnknownSlot: return "UnknownSlot";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::NoBinding: return "NoBinding";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptCatalog: return "CorruptCatalog";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::MalformedCompletion: return "MalformedCompletion";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::DuplicateTask: return "DuplicateTask";
    case ErrorCode::InvalidDef: return "InvalidDef";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::CatalogMutationFailed: return "CatalogMutationFailed";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ActorNotAllowed: return "ActorNotAllowed";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::InvalidScript: return "InvalidScript";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace carebot
