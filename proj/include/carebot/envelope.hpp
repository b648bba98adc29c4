#pragma once

#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

namespace carebot {

/// Finds the first balanced `{...}` span that parses as a JSON object,
/// ignoring any prose around it. Never throws.
std::optional<nlohmann::json> extract_first_object(std::string_view completion) noexcept;

/// Like extract_first_object, but throws MalformedCompletion when there is none.
nlohmann::json parse_envelope(std::string_view completion);

}  // namespace carebot
