#include "carebot/names.hpp"

#include <algorithm>
#include <cctype>

namespace carebot {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto begin = std::find_if_not(s.begin(), s.end(), is_space);
  auto end = std::find_if_not(s.rbegin(), s.rend(), is_space).base();
  return begin < end ? std::string(begin, end) : std::string{};
}

std::string normalize_name(std::string_view raw) {
  std::string out;
  bool pending_sep = false;
  for (char c : trim(raw)) {
    if (is_space(c)) {
      pending_sep = true;
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string fold_value(std::string_view raw) { return to_lower(trim(raw)); }

bool contains_folded(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

bool contains_word(std::string_view haystack, std::string_view word) {
  if (word.empty()) return false;
  const std::string h = to_lower(haystack);
  const std::string w = to_lower(word);
  for (auto pos = h.find(w); pos != std::string::npos; pos = h.find(w, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word(h[pos - 1]);
    const auto after = pos + w.size();
    const bool right_ok = after >= h.size() || !is_word(h[after]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::vector<std::string> fold_unique(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    auto folded = fold_value(v);
    if (folded.empty()) continue;
    if (std::find(out.begin(), out.end(), folded) == out.end()) out.push_back(std::move(folded));
  }
  return out;
}

std::string join_alternatives(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += (i + 1 == values.size()) ? " or " : ", ";
    out += values[i];
  }
  return out;
}

}  // namespace carebot
