#include "carebot/envelope.hpp"

#include "carebot/errors.hpp"

namespace carebot {

namespace {

// End (exclusive) of the balanced object opening at `open`, tracking string
// literals so braces inside quotes do not count.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<nlohmann::json> extract_first_object(std::string_view completion) noexcept {
  try {
    for (auto open = completion.find('{'); open != std::string_view::npos;
         open = completion.find('{', open + 1)) {
      const auto end = balanced_end(completion, open);
      if (!end) continue;
      const auto candidate = completion.substr(open, *end - open);
      auto parsed = nlohmann::json::parse(candidate.begin(), candidate.end(), nullptr, false);
      if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
  } catch (...) {
    // parse() in non-throwing mode only fails on allocation.
  }
  return std::nullopt;
}

nlohmann::json parse_envelope(std::string_view completion) {
  if (auto obj = extract_first_object(completion)) return std::move(*obj);
  throw Error(ErrorCode::MalformedCompletion, "completion holds no JSON object");
}

}  // namespace carebot
